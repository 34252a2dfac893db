import json
import os

import pytest

from jus.model import model_from_json

HERE = os.path.dirname(__file__)


def data_path(name):
    return os.path.join(HERE, "data", name)


@pytest.fixture
def two_world_path():
    return data_path("two_world.json")


@pytest.fixture
def two_world(two_world_path):
    with open(two_world_path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
