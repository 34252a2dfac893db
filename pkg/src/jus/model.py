"""Finite subset models and constant specifications, with JSON files.

A model stores only what the valuation can ever read: a finite world set
with a nonempty normal core, truth assignments v0 (normal worlds,
propositions) and v1 (non-normal worlds, whole formulas), and evidence sets
for atomic terms at normal worlds. Everything unlisted falls back to a
default: 0 for v0/v1, and the model-wide evidence_default for evidence.
Evidence for application terms is never stored; the canonical maximal
choice is computed on demand in the semantics module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .parse import SourceError, parse_formula, parse_term, print_formula, print_term
from .syntax import Constant, Formula, Implies, Prop, Term, is_atomic


@dataclass(frozen=True)
class SubsetModel:
    """Worlds are opaque string identifiers, kept in file order.

    v0 maps (normal world, proposition index) to a truth value; v1 maps
    (non-normal world, formula) likewise; evidence maps (normal world,
    atomic term) to a set of worlds. All three are finite supports.
    """

    worlds: tuple[str, ...]
    normal: frozenset[str]
    v0: dict = field(default_factory=dict)
    v1: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)
    evidence_default: str = "all"


@dataclass(frozen=True)
class ConstantSpec:
    """Which constants justify which formulas.

    mode "empty" pairs nothing, "explicit" pairs exactly the listed
    (constant, formula) entries, "full" pairs every constant with every
    formula of iterated axiom shape (membership is decided structurally
    by the proof module; pairs is unused in that mode).
    """

    mode: str
    pairs: tuple = ()


def wmp(m: SubsetModel) -> frozenset:
    """Worlds closed under modus ponens: all normal ones, plus each
    non-normal world whose v1 support never asserts A and A -> B without
    also asserting B. Unlisted formulas count as 0, so only the finite
    support needs scanning."""
    out = set(m.normal)
    for omega in m.worlds:
        if omega in m.normal:
            continue
        asserted = [f for (w, f), val in m.v1.items() if w == omega and val]
        closed = True
        for f in asserted:
            if isinstance(f, Implies) and f.left in asserted:
                if not m.v1.get((omega, f.right), False):
                    closed = False
                    break
        if closed:
            out.add(omega)
    return frozenset(out)


def evidence_atomic(m: SubsetModel, omega: str, t: Term) -> frozenset:
    """Stored evidence set for an atomic term at a normal world, or the
    model default (everything or nothing) when unlisted."""
    got = m.evidence.get((omega, t))
    if got is not None:
        return got
    if m.evidence_default == "all":
        return frozenset(m.worlds)
    return frozenset()


def validate_model(m: SubsetModel) -> list:
    """Returns a list of violated-invariant descriptions; empty means ok."""
    bad = []
    wset = set(m.worlds)
    if len(wset) != len(m.worlds):
        bad.append("duplicate world identifiers")
    if not m.normal:
        bad.append("set of normal worlds must be nonempty")
    if not m.normal <= wset:
        bad.append("normal worlds must all be listed in worlds")
    for (w, p), val in m.v0.items():
        if w not in m.normal:
            bad.append("v0 key %r is not a normal world" % w)
        if not (isinstance(p, int) and p >= 1):
            bad.append("v0 proposition index %r must be an integer >= 1" % (p,))
        if not isinstance(val, bool):
            bad.append("v0 value for (%r, P%s) must be a boolean" % (w, p))
    for (w, f), val in m.v1.items():
        if w not in wset or w in m.normal:
            bad.append("v1 key %r is not a non-normal world" % w)
        if not isinstance(f, Formula):
            bad.append("v1 key %r is not a formula" % (f,))
        if not isinstance(val, bool):
            bad.append("v1 value at %r must be a boolean" % w)
    for (w, t), members in m.evidence.items():
        if w not in m.normal:
            bad.append("evidence key %r is not a normal world" % w)
        if not (isinstance(t, Term) and is_atomic(t)):
            bad.append("evidence term %r is not atomic" % (t,))
        if not frozenset(members) <= wset:
            bad.append("evidence set for %r at %r mentions unknown worlds" % (t, w))
    if m.evidence_default not in ("all", "empty"):
        bad.append("evidence_default must be 'all' or 'empty'")
    return bad


def validate_cs_structure(cs: ConstantSpec) -> list:
    """Structural checks only; the axiom-shape test on explicit pairs
    lives in the proof module, which owns axiom matching."""
    bad = []
    if cs.mode not in ("empty", "explicit", "full"):
        bad.append("mode must be one of empty, explicit, full")
    if cs.mode != "explicit" and cs.pairs:
        bad.append("pairs are only meaningful in explicit mode")
    for entry in cs.pairs:
        c, a = entry
        if not isinstance(c, Constant):
            bad.append("paired term %r is not a constant" % (c,))
        if not isinstance(a, Formula):
            bad.append("paired value %r is not a formula" % (a,))
    return bad


# -- JSON files ---------------------------------------------------------

_MODEL_KEYS = {"worlds", "normal", "v0", "v1", "evidence", "evidence_default"}


def _require_keys(obj: dict, allowed: set, what: str):
    if not isinstance(obj, dict):
        raise ValueError("%s must be a JSON object" % what)
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError("%s has unknown keys: %s" % (what, ", ".join(sorted(unknown))))


def _parse_inner(text, parser, what):
    if not isinstance(text, str):
        raise ValueError("%s key %r must be a string" % (what, text))
    try:
        return parser(text)
    except SourceError as e:
        raise ValueError("bad %s key %r: %s" % (what, text, e.message))


def model_from_json(obj: dict, validate: bool = True) -> SubsetModel:
    """Decode the model file shape; unknown keys are rejected, and the
    result is checked against validate_model before being returned.

    validate=False skips that last check (decoding errors still raise),
    for callers that want the violation list rather than an exception.
    """
    _require_keys(obj, _MODEL_KEYS, "model file")
    for key in ("worlds", "normal"):
        if key not in obj:
            raise ValueError("model file is missing %r" % key)
        if not (isinstance(obj[key], list) and all(isinstance(w, str) for w in obj[key])):
            raise ValueError("%r must be a list of world names" % key)
    worlds = tuple(obj["worlds"])
    normal = frozenset(obj["normal"])
    v0 = {}
    for w, assign in _json_section(obj, "v0").items():
        for key, val in assign.items():
            f = _parse_inner(key, parse_formula, "v0")
            if not isinstance(f, Prop):
                raise ValueError("v0 key %r must name a proposition" % key)
            v0[(w, f.index)] = _json_bool(val, "v0", key)
    v1 = {}
    for w, assign in _json_section(obj, "v1").items():
        for key, val in assign.items():
            f = _parse_inner(key, parse_formula, "v1")
            v1[(w, f)] = _json_bool(val, "v1", key)
    evidence = {}
    for w, assign in _json_section(obj, "evidence").items():
        for key, val in assign.items():
            t = _parse_inner(key, parse_term, "evidence")
            if not (isinstance(val, list) and all(isinstance(u, str) for u in val)):
                raise ValueError("evidence set for %r must be a list of world names" % key)
            evidence[(w, t)] = frozenset(val)
    default = obj.get("evidence_default", "all")
    m = SubsetModel(worlds, normal, v0, v1, evidence, default)
    if validate:
        bad = validate_model(m)
        if bad:
            raise ValueError("invalid model: " + "; ".join(bad))
    return m


def _json_section(obj: dict, key: str) -> dict:
    sec = obj.get(key, {})
    if not isinstance(sec, dict) or not all(
        isinstance(w, str) and isinstance(v, dict) for w, v in sec.items()
    ):
        raise ValueError("%r must map world names to objects" % key)
    return sec


def _json_bool(val, section, key):
    if not isinstance(val, bool):
        raise ValueError("%s value for %r must be true or false" % (section, key))
    return val


def model_to_json(m: SubsetModel) -> dict:
    """Inverse of model_from_json up to key order; inner keys are printed
    in canonical concrete syntax and sorted, world sets follow file order."""
    order = {w: i for i, w in enumerate(m.worlds)}
    v0 = {}
    for (w, p), val in m.v0.items():
        v0.setdefault(w, {})["P%d" % p] = val
    v1 = {}
    for (w, f), val in m.v1.items():
        v1.setdefault(w, {})[print_formula(f)] = val
    evidence = {}
    for (w, t), members in m.evidence.items():
        evidence.setdefault(w, {})[print_term(t)] = sorted(members, key=order.get)
    out = {
        "worlds": list(m.worlds),
        "normal": sorted(m.normal, key=order.get),
        "v0": {w: dict(sorted(v0[w].items())) for w in sorted(v0, key=order.get)},
        "v1": {w: dict(sorted(v1[w].items())) for w in sorted(v1, key=order.get)},
        "evidence": {
            w: dict(sorted(evidence[w].items())) for w in sorted(evidence, key=order.get)
        },
        "evidence_default": m.evidence_default,
    }
    return out


_CS_KEYS = {"mode", "pairs"}


def cs_from_json(obj: dict) -> ConstantSpec:
    _require_keys(obj, _CS_KEYS, "constant specification file")
    mode = obj.get("mode")
    if mode not in ("empty", "explicit", "full"):
        raise ValueError("mode must be one of empty, explicit, full")
    raw = obj.get("pairs", [])
    if not isinstance(raw, list):
        raise ValueError("pairs must be a list")
    pairs = []
    for entry in raw:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ValueError("each pair must be a [constant, formula] list")
        c = _parse_inner(entry[0], parse_term, "pairs")
        a = _parse_inner(entry[1], parse_formula, "pairs")
        if not isinstance(c, Constant):
            raise ValueError("paired term %r is not a constant" % entry[0])
        pairs.append((c, a))
    cs = ConstantSpec(mode, tuple(pairs))
    bad = validate_cs_structure(cs)
    if bad:
        raise ValueError("invalid constant specification: " + "; ".join(bad))
    return cs


def cs_to_json(cs: ConstantSpec) -> dict:
    return {
        "mode": cs.mode,
        "pairs": [[print_term(c), print_formula(a)] for c, a in cs.pairs],
    }


def load_model(path: str) -> SubsetModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(json.load(fh))


def save_model(m: SubsetModel, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(m), fh, indent=2)
        fh.write("\n")


def load_cs(path: str) -> ConstantSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return cs_from_json(json.load(fh))
