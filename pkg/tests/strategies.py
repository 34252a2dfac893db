"""Hypothesis strategies for object-language ASTs."""

import hypothesis.strategies as st

from jus.syntax import App, Constant, Implies, Justifies, Not, Prop, Up, Update, Variable


def props():
    return st.integers(1, 3).map(Prop)


def atomic_terms():
    return st.one_of(st.integers(1, 3).map(Constant), st.integers(1, 3).map(Variable))


def terms(depth):
    if depth <= 0:
        return atomic_terms()
    sub = st.deferred(lambda: terms(depth - 1))
    fsub = st.deferred(lambda: formulas(depth - 1))
    return st.one_of(
        atomic_terms(),
        fsub.map(Up),
        st.tuples(sub, fsub, sub).map(lambda x: App(*x)),
    )


def formulas(depth):
    if depth <= 0:
        return props()
    sub = st.deferred(lambda: formulas(depth - 1))
    return st.one_of(
        props(),
        sub.map(Not),
        st.tuples(sub, sub).map(lambda x: Implies(*x)),
        st.tuples(terms(depth - 1), sub).map(lambda x: Justifies(*x)),
        st.tuples(sub, sub).map(lambda x: Update(*x)),
    )
