"""Axiom matching, proof checking, and the derived-proof constructions.

The cross-check section re-states the seven schemas from scratch (its own
expansion helpers, its own peeling, its own truth tables) and compares the
verdicts with match_axiom on every formula in a bounded universe. The
checker itself is trusted nowhere else: every transformer's output goes
back through check_proof here and in the acceptance suite.
"""

import itertools
import random

import pytest

from jus.model import ConstantSpec
from jus.parse import parse_formula, print_formula
from jus.proof import (
    CheckFailure,
    Proof,
    ProofBuilder,
    ProofStep,
    app_instance,
    check_proof,
    cs_contains,
    funct_instance,
    indep_instance,
    match_axiom,
    norm_instance,
    pers_instance,
    proof_from_json,
    proof_to_json,
    prove_aux,
    prove_box,
    prove_necessitation,
    prove_persistence_fo,
    prove_ramsey,
    taut_check,
    up_instance,
    validate_cs,
)
from jus.syntax import (
    App,
    Constant,
    Implies,
    Justifies,
    Not,
    Prop,
    Up,
    Update,
    Variable,
    conj,
    disj,
    equiv,
    length,
)

P1, P2, P3 = Prop(1), Prop(2), Prop(3)
FULL = ConstantSpec("full")
EMPTY = ConstantSpec("empty")


def assert_checks(p, cs=FULL):
    fail = check_proof(p, cs)
    assert fail is None, str(fail)


# -- tautology checking ---------------------------------------------------

def test_taut_check_examples():
    assert taut_check(Implies(P1, P1))
    box = Update(P1, P2)
    assert taut_check(disj(box, Not(box)))  # [P1]P2 is one opaque atom
    assert not taut_check(Justifies(Up(P1), P1))


def test_taut_check_atom_granularity():
    j = Justifies(Variable(1), P1)
    assert taut_check(Implies(j, j))
    # distinct justification formulas are distinct atoms
    assert not taut_check(Implies(j, Justifies(Variable(2), P1)))


# -- axiom matching -------------------------------------------------------

def test_match_axiom_up_with_prefix():
    f = parse_formula("[P2][P1] up(P1) : P1")
    hits = match_axiom(f)
    assert any(i.schema == "Up" and i.prefix == (P2,) for i in hits)


def test_match_axiom_indep():
    inner = Justifies(Variable(1), P1)
    hits = match_axiom(equiv(Update(P1, inner), inner))
    assert any(i.schema == "Indep" for i in hits)


def test_match_axiom_indep_side_condition():
    inner = Justifies(Up(P1), P1)
    assert match_axiom(equiv(Update(P1, inner), inner)) == []


def test_match_axiom_builders_round_trip():
    t, s = Constant(1), Variable(1)
    cases = [
        ("App", app_instance(t, s, P1, P2)),
        ("Indep", indep_instance(P1, P2)),
        ("Funct", funct_instance(P1, Justifies(s, P2))),
        ("Norm", norm_instance(P1, P2, P3)),
        ("Up", up_instance(Implies(P1, P2))),
        ("Pers", pers_instance(P1, Not(P2))),
    ]
    for schema, f in cases:
        assert any(i.schema == schema for i in match_axiom(f)), schema
        boxed = Update(P3, f)
        assert any(
            i.schema == schema and i.prefix == (P3,) for i in match_axiom(boxed)
        ), schema


def test_indep_instance_rejects_dependence():
    with pytest.raises(ValueError):
        indep_instance(P1, Justifies(Up(P1), P2))


# -- brute-force cross-check ---------------------------------------------
#
# Universe: all formulas over P1, c1, x1 with at most 11 constructor nodes
# and length at most 9 (a node budget is needed because up(C) has length 1
# for every C, so the pure length bound is met by infinitely many formulas).
# 11 nodes is exactly enough for the smallest Pers instance.

def _universe(max_nodes=11, max_len=9):
    terms = {1: [Constant(1), Variable(1)]}
    forms = {1: [P1]}
    for n in range(2, max_nodes + 1):
        ts = [Up(c) for c in forms[n - 1]]
        fs = [Not(g) for g in forms[n - 1]]
        for an in range(1, n - 1):
            bn = n - 1 - an
            for a in forms.get(an, ()):
                for b in forms.get(bn, ()):
                    fs.append(Implies(a, b))
                    fs.append(Update(a, b))
            for t in terms.get(an, ()):
                for b in forms.get(bn, ()):
                    fs.append(Justifies(t, b))
        for an in range(1, n - 2):
            for bn in range(1, n - 1 - an):
                cn = n - 1 - an - bn
                for s in terms.get(an, ()):
                    for a in forms.get(bn, ()):
                        for t in terms.get(cn, ()):
                            ts.append(App(s, a, t))
        terms[n] = ts
        forms[n] = fs
    for bucket in forms.values():
        for f in bucket:
            if length(f) <= max_len:
                yield f


# schema shapes restated with plain constructors, nothing shared with
# the implementation beyond the AST types themselves

def _land(x, y):
    return Not(Implies(x, Not(y)))


def _liff(x, y):
    return Not(Implies(Implies(x, y), Not(Implies(y, x))))


def _brute_atoms_of(x, out):
    if isinstance(x, (Constant, Variable)):
        out.add(x)
    elif isinstance(x, Up):
        out.add(x)
        _brute_atoms_of(x.body, out)
    elif isinstance(x, App):
        _brute_atoms_of(x.left, out)
        _brute_atoms_of(x.annotation, out)
        _brute_atoms_of(x.right, out)
    elif isinstance(x, Not):
        _brute_atoms_of(x.body, out)
    elif isinstance(x, Implies):
        _brute_atoms_of(x.left, out)
        _brute_atoms_of(x.right, out)
    elif isinstance(x, Justifies):
        _brute_atoms_of(x.term, out)
        _brute_atoms_of(x.body, out)
    elif isinstance(x, Update):
        _brute_atoms_of(x.announcement, out)
        _brute_atoms_of(x.body, out)


def _brute_up_independent(f) -> bool:
    # walk formula structure only; term content is not a subformula
    if isinstance(f, Update):
        atoms = set()
        _brute_atoms_of(f.body, atoms)
        if Up(f.announcement) in atoms:
            return False
        return _brute_up_independent(f.announcement) and _brute_up_independent(f.body)
    if isinstance(f, Not):
        return _brute_up_independent(f.body)
    if isinstance(f, Implies):
        return _brute_up_independent(f.left) and _brute_up_independent(f.right)
    if isinstance(f, Justifies):
        return _brute_up_independent(f.body)
    return True


def _brute_taut(f) -> bool:
    atoms = []
    seen = set()

    def walk(g):
        if isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, Implies):
            walk(g.left)
            walk(g.right)
        elif g not in seen:
            seen.add(g)
            atoms.append(g)

    walk(f)

    def val(g, row):
        if isinstance(g, Not):
            return not val(g.body, row)
        if isinstance(g, Implies):
            return val(g.right, row) or not val(g.left, row)
        return row[g]

    for bits in itertools.product((False, True), repeat=len(atoms)):
        if not val(f, dict(zip(atoms, bits))):
            return False
    return True


def _brute_core(g) -> set:
    out = set()
    if _brute_taut(g):
        out.add("Taut")
    if isinstance(g, Update):
        a = g.announcement
        if g == Update(a, Justifies(Up(a), a)):
            out.add("Up")
    if isinstance(g, Implies) and isinstance(g.left, Justifies):
        t = g.left.term
        if isinstance(t, Up):
            a, b = t.body, g.left.body
            if g == Implies(Justifies(Up(a), b), Update(a, Justifies(Up(a), b))):
                out.add("Pers")
    if (
        isinstance(g, Not)
        and isinstance(g.body, Implies)
        and isinstance(g.body.left, Implies)
    ):
        x = g.body.left.left
        y = g.body.left.right
        if isinstance(y, Justifies) and isinstance(y.term, App):
            t, a, s, b = y.term.left, y.term.annotation, y.term.right, y.body
            lhs = _land(Justifies(t, Implies(a, b)), Justifies(s, a))
            if g == _liff(lhs, y):
                out.add("App")
        if isinstance(x, Update):
            c, a = x.announcement, x.body
            if g == _liff(Update(c, a), a) and _brute_up_independent(Update(c, a)):
                out.add("Indep")
            if isinstance(a, Not) and g == _liff(
                Update(c, Not(a.body)), Not(Update(c, a.body))
            ):
                out.add("Funct")
            if isinstance(a, Implies) and g == _liff(
                Update(c, a), Implies(Update(c, a.left), Update(c, a.right))
            ):
                out.add("Norm")
    return out


def _brute_schemas(f) -> set:
    out = set()
    depth = 0
    g = f
    while True:
        out |= {(schema, depth) for schema in _brute_core(g)}
        if not isinstance(g, Update):
            return out
        g = g.body
        depth += 1


def test_match_axiom_cross_check():
    counts = {}
    checked = 0
    for f in _universe():
        checked += 1
        got = {(i.schema, len(i.prefix)) for i in match_axiom(f)}
        want = _brute_schemas(f)
        assert got == want, print_formula(f)
        for schema, _ in got:
            counts[schema] = counts.get(schema, 0) + 1
    assert checked > 30000
    # the length budget admits Taut, Up, and Pers instances only: the
    # biconditional expansion alone already costs more than nine
    assert counts.get("Up", 0) > 0
    assert counts.get("Pers", 0) > 0
    for schema in ("App", "Indep", "Funct", "Norm"):
        assert schema not in counts


# -- constant specifications ----------------------------------------------

def test_cs_contains_full_taut():
    assert cs_contains(FULL, Constant(1), Implies(P1, Implies(P2, P1)))


def test_cs_contains_full_iterated():
    f = parse_formula("[P1] c1 : [P2] up(P2) : P2")
    assert cs_contains(FULL, Constant(2), f)


def test_cs_contains_explicit_and_empty():
    assert not cs_contains(ConstantSpec("explicit"), Constant(1), P1)
    assert not cs_contains(EMPTY, Constant(1), Implies(P1, P1))
    cs = ConstantSpec("explicit", ((Constant(1), Implies(P1, P1)),))
    assert cs_contains(cs, Constant(1), Implies(P1, P1))
    assert not cs_contains(cs, Constant(2), Implies(P1, P1))


def test_validate_cs_checks_pair_shape():
    good = ConstantSpec("explicit", ((Constant(1), up_instance(P1)),))
    assert validate_cs(good) == []
    bad = ConstantSpec("explicit", ((Constant(1), P1),))
    assert any("axiom" in v for v in validate_cs(bad))


# -- proof checking -------------------------------------------------------

def test_check_proof_single_axiom():
    p = Proof((ProofStep(parse_formula("[P1] up(P1) : P1"), "axiom"),))
    assert check_proof(p, EMPTY) is None


def test_check_proof_modus_ponens():
    a = Implies(P1, P1)
    b = Implies(P2, a)
    p = Proof(
        (
            ProofStep(a, "axiom"),
            ProofStep(Implies(a, b), "axiom"),
            ProofStep(b, "mp", premises=(1, 2)),
        )
    )
    assert check_proof(p, EMPTY) is None


def test_check_proof_an_needs_cs():
    p = Proof((ProofStep(Justifies(Constant(1), P1), "an"),))
    fail = check_proof(p, EMPTY)
    assert isinstance(fail, CheckFailure)
    assert fail.index == 1
    assert "not in the constant specification" in fail.reason
    assert check_proof(p, ConstantSpec("explicit", ((Constant(1), P1),))) is None


def test_check_proof_failure_modes():
    assert check_proof(Proof(()), EMPTY).index == 0
    p = Proof((ProofStep(P1, "axiom"),))
    assert "not an axiom" in check_proof(p, EMPTY).reason
    p = Proof((ProofStep(Implies(P1, P1), "axiom", schema="Up"),))
    assert "schema" in check_proof(p, EMPTY).reason
    p = Proof((ProofStep(P1, "mp", premises=(1, 2)),))
    assert "earlier step" in check_proof(p, EMPTY).reason
    p = Proof(
        (
            ProofStep(Implies(P1, P1), "axiom"),
            ProofStep(Implies(P2, P2), "axiom"),
            ProofStep(P2, "mp", premises=(1, 2)),
        )
    )
    assert check_proof(p, EMPTY).index == 3
    p = Proof((ProofStep(P1, "guess"),))
    assert "unknown rule" in check_proof(p, EMPTY).reason


def test_check_proof_reports_first_failure():
    p = Proof(
        (
            ProofStep(Implies(P1, P1), "axiom"),
            ProofStep(P2, "axiom"),
            ProofStep(P3, "axiom"),
        )
    )
    assert check_proof(p, EMPTY).index == 2


# -- the builder ----------------------------------------------------------

def test_taut_consequence_detachment():
    b = ProofBuilder()
    a = Implies(P1, P1)
    goal = Implies(P2, a)
    i = b.axiom(a)
    j = b.axiom(Implies(a, goal))
    b.taut_consequence([i, j], goal)
    p = b.proof()
    assert_checks(p, EMPTY)
    assert p.conclusion is goal


def test_taut_consequence_from_conjunction():
    b = ProofBuilder()
    both = conj(Implies(P1, P1), Implies(P2, P2))
    i = b.axiom(both, "Taut")
    b.taut_consequence([i], Implies(P1, P1))
    p = b.proof()
    assert_checks(p, EMPTY)
    assert p.conclusion == Implies(P1, P1)


def test_taut_consequence_rejects_non_consequence():
    b = ProofBuilder()
    with pytest.raises(ValueError, match="tautological consequence"):
        b.taut_consequence([], P1)


def test_builder_validates_axioms_eagerly():
    b = ProofBuilder()
    with pytest.raises(ValueError, match="not an axiom"):
        b.axiom(P1)
    with pytest.raises(ValueError, match="schema"):
        b.axiom(Implies(P1, P1), "Up")
    with pytest.raises(ValueError, match="form"):
        b.an(P1)


def test_builder_deduplicates_repeated_formulas():
    b = ProofBuilder()
    i = b.axiom(Implies(P1, P1))
    j = b.axiom(Implies(P1, P1))
    assert i == j
    assert len(b.proof().steps) == 1


# -- transformers ---------------------------------------------------------

def test_prove_box_on_axiom():
    b = ProofBuilder()
    b.axiom(up_instance(P1), "Up")
    boxed = prove_box(b.proof(), P2, EMPTY)
    assert_checks(boxed, EMPTY)
    assert boxed.conclusion == parse_formula("[P2][P1] up(P1) : P1")


def test_prove_box_on_taut():
    b = ProofBuilder()
    b.axiom(Implies(P1, P1), "Taut")
    boxed = prove_box(b.proof(), P1, EMPTY)
    assert_checks(boxed, EMPTY)
    assert boxed.conclusion == Update(P1, Implies(P1, P1))


def test_prove_box_replays_mp():
    b = ProofBuilder()
    a = Implies(P1, P1)
    goal = Implies(P2, a)
    i = b.axiom(a)
    j = b.axiom(Implies(a, goal))
    b.mp(i, j)
    boxed = prove_box(b.proof(), P3, EMPTY)
    assert_checks(boxed, EMPTY)
    assert boxed.conclusion == Update(P3, goal)


def test_prove_box_requires_checked_input():
    p = Proof((ProofStep(P1, "axiom"),))
    with pytest.raises(ValueError, match="does not check"):
        prove_box(p, P1, EMPTY)


def test_prove_necessitation_single_axiom():
    b = ProofBuilder()
    b.axiom(Implies(P1, P1), "Taut")
    t, p = prove_necessitation(b.proof(), FULL)
    assert t == Constant(1)  # smallest constant not used by the theorem
    assert_checks(p)
    assert p.conclusion == Justifies(t, Implies(P1, P1))


def test_prove_necessitation_mp_gives_application():
    b = ProofBuilder()
    a = Implies(P1, P1)
    goal = Implies(P2, a)
    i = b.axiom(a)
    j = b.axiom(Implies(a, goal))
    b.mp(i, j)
    t, p = prove_necessitation(b.proof(), FULL)
    assert isinstance(t, App)
    assert t.annotation is a
    assert_checks(p)
    assert p.conclusion == Justifies(t, goal)


def test_prove_necessitation_explicit_needs_witness():
    b = ProofBuilder()
    b.axiom(Implies(P1, P1), "Taut")
    with pytest.raises(ValueError, match="witness"):
        prove_necessitation(b.proof(), ConstantSpec("explicit"))
    cs = ConstantSpec("explicit", ((Constant(7), Implies(P1, P1)),))
    t, p = prove_necessitation(b.proof(), cs)
    assert t == Constant(7)
    assert_checks(p, cs)


def test_prove_aux_checks():
    p = prove_aux(Constant(1), Variable(1), P1, P2, P3, FULL)
    assert_checks(p)
    want = equiv(
        conj(
            Update(P3, Justifies(Constant(1), Implies(P1, P2))),
            Update(P3, Justifies(Variable(1), P1)),
        ),
        Update(P3, Justifies(App(Constant(1), P1, Variable(1)), P2)),
    )
    assert p.conclusion == want


def test_prove_aux_empty_prefix():
    p = prove_aux(Constant(1), Variable(1), P1, P2, None, FULL)
    assert_checks(p)
    assert p.conclusion == app_instance(Constant(1), Variable(1), P1, P2)


def test_prove_ramsey_checks():
    p = prove_ramsey(Variable(1), P1, P2, FULL)
    assert_checks(p)
    want = equiv(
        Justifies(Variable(1), Implies(P1, P2)),
        Update(P1, Justifies(App(Variable(1), P1, Up(P1)), P2)),
    )
    assert p.conclusion == want


def test_prove_ramsey_side_condition():
    with pytest.raises(ValueError, match="not up-independent"):
        prove_ramsey(Up(P1), P1, P1, FULL)


def test_prove_persistence_fo_variable():
    p = prove_persistence_fo(Variable(1), P1, P2, FULL)
    assert_checks(p)
    claim = Justifies(Variable(1), P1)
    assert p.conclusion == Implies(claim, Update(P2, claim))


def test_prove_persistence_fo_up_term():
    p = prove_persistence_fo(Up(P1), P2, P1, FULL)
    assert_checks(p)
    claim = Justifies(Up(P1), P2)
    assert p.conclusion == Implies(claim, Update(P1, claim))
    # the up(c) case is a single Pers axiom
    assert len(p.steps) == 1


def test_prove_persistence_fo_application():
    t = App(Variable(1), Implies(P1, P1), Variable(2))
    p = prove_persistence_fo(t, P2, P3, FULL)
    assert_checks(p)
    claim = Justifies(t, P2)
    assert p.conclusion == Implies(claim, Update(P3, claim))


def test_prove_persistence_fo_rejections():
    with pytest.raises(ValueError, match="justification"):
        prove_persistence_fo(Variable(1), Justifies(Variable(2), P1), P2, FULL)
    with pytest.raises(ValueError, match="annotation"):
        prove_persistence_fo(
            App(Variable(1), Justifies(Variable(2), P1), Variable(2)), P1, P2, FULL
        )
    with pytest.raises(ValueError, match="occurs inside"):
        # up(P2) hides inside a different up-term, where Indep cannot reach
        prove_persistence_fo(Up(Justifies(Up(P2), P1)), P1, P2, FULL)


# -- proof files ----------------------------------------------------------

def test_proof_json_round_trip():
    p = prove_ramsey(Variable(1), P1, P2, FULL)
    again = proof_from_json(proof_to_json(p))
    assert [s.formula for s in again.steps] == [s.formula for s in p.steps]
    assert_checks(again)


def test_proof_json_rejections():
    with pytest.raises(ValueError, match="nonempty"):
        proof_from_json([])
    with pytest.raises(ValueError, match="formula"):
        proof_from_json([{"rule": "axiom"}])
    with pytest.raises(ValueError, match="rule"):
        proof_from_json([{"formula": "P1", "rule": "hope"}])
    with pytest.raises(ValueError, match="schema"):
        proof_from_json([{"formula": "P1", "rule": "axiom", "schema": "zap"}])
    with pytest.raises(ValueError, match="only axiom steps"):
        proof_from_json([{"formula": "P1", "rule": "mp", "schema": "up", "premises": [1, 2]}])
    with pytest.raises(ValueError, match="premises"):
        proof_from_json([{"formula": "P1", "rule": "mp"}])
    with pytest.raises(ValueError, match="only modus ponens"):
        proof_from_json([{"formula": "P1", "rule": "axiom", "premises": [1, 2]}])
    with pytest.raises(ValueError, match="constant"):
        proof_from_json([{"formula": "c1 : P1", "rule": "an", "constant": "x1"}])
    with pytest.raises(ValueError, match="unknown keys"):
        proof_from_json([{"formula": "P1", "rule": "axiom", "vibe": "good"}])


# -- transformer fuzz ------------------------------------------------------

def _random_taut_proof(rng):
    """A checked proof built from random tautology instances glued by MP."""
    pool = [P1, P2, P3, Justifies(Variable(1), P1), Update(P1, P2)]
    b = ProofBuilder()
    idx = b.axiom(Implies(rng.choice(pool), Implies(P1, P1)), None) if rng.random() < 0.3 else None
    a = rng.choice(pool)
    first = b.axiom(Implies(a, a), "Taut")
    goal = disj(rng.choice(pool), Implies(a, a))
    last = b.taut_consequence([first], goal)
    if idx is not None and rng.random() < 0.5:
        last = b.taut_consequence([idx, last], conj(b.formula_at(idx), goal))
    return b.proof()


def test_transformers_fuzzed_against_checker():
    rng = random.Random(11)
    for trial in range(30):
        p = _random_taut_proof(rng)
        assert_checks(p, EMPTY)
        c = rng.choice([P1, P2, Justifies(Variable(2), P3)])
        boxed = prove_box(p, c, FULL)
        assert_checks(boxed)
        assert boxed.conclusion == Update(c, p.conclusion)
        t, nec = prove_necessitation(p, FULL)
        assert_checks(nec)
        assert nec.conclusion == Justifies(t, p.conclusion)
        t2, nec2 = prove_necessitation(boxed, FULL)
        assert_checks(nec2)
        assert nec2.conclusion == Justifies(t2, boxed.conclusion)
