"""Hilbert-style proofs: axiom matching, checking, and proof construction.

Axiom schemas (each carries an arbitrary, possibly empty, announcement
prefix; conjunction and biconditional below are the fixed expansions):

    Taut   any propositional tautology
    App    (t:(A->B) & s:A) <-> (t *[A] s):B
    Indep  [C]A <-> A, provided [C]A is up-independent
    Funct  [C]~A <-> ~[C]A
    Norm   [C](A->B) <-> ([C]A -> [C]B)
    Up     [A] up(A):A
    Pers   up(A):B -> [A] up(A):B

Rules: modus ponens, and axiom necessitation concluding [updates]c:A for
any (c, A) licensed by the constant specification.

The checker is the only trusted component. Proof transformers (boxing a
proof under an announcement, constructive necessitation, the Ramsey and
persistence derivations) emit ordinary proofs and are expected to be
validated by check_proof; nothing they produce is accepted on faith.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ConstantSpec
from .parse import SourceError, parse_formula, parse_term, print_formula, print_term
from .syntax import (
    App,
    Constant,
    Formula,
    Implies,
    Justifies,
    Not,
    Term,
    Up,
    Update,
    atm,
    conj,
    constants_in,
    equiv,
    is_atomic,
    prefix_splits,
    subformulas,
    up_independent,
)

SCHEMAS = ("Taut", "App", "Indep", "Funct", "Norm", "Up", "Pers")


# -- tautology checking -------------------------------------------------

def taut_atoms(f: Formula) -> list:
    """Maximal subformulas not headed by negation or implication, in first
    occurrence order. These are the atoms of the boolean skeleton."""
    out = []
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, Implies):
            stack.extend((g.right, g.left))
        elif g not in seen:
            seen.add(g)
            out.append(g)
    return out


_MAX_TAUT_ATOMS = 24  # 2^24-bit table columns; enough for every schema here


def taut_check(f: Formula) -> bool:
    """Truth-table validity of the boolean skeleton.

    Columns of the table are big integers, one bit per assignment row, so
    the connectives reduce to bitwise operations.
    """
    atoms = taut_atoms(f)
    if len(atoms) > _MAX_TAUT_ATOMS:
        raise ValueError("formula has %d boolean atoms; refusing the 2^%d-row table"
                         % (len(atoms), len(atoms)))
    rows = 1 << len(atoms)
    full = (1 << rows) - 1
    cols = {}
    for i, atom in enumerate(atoms):
        # bit r of the column holds the atom's value in assignment row r
        block = (1 << (1 << i)) - 1
        unit = block << (1 << i)
        width = 2 << i
        while width < rows:
            unit |= unit << width
            width <<= 1
        cols[atom] = unit

    def col(g: Formula) -> int:
        if isinstance(g, Not):
            return full & ~col(g.body)
        if isinstance(g, Implies):
            return full & (~col(g.left) | col(g.right))
        return cols[g]

    return col(f) == full


# -- axiom matching ------------------------------------------------------

@dataclass(frozen=True)
class AxiomInstance:
    schema: str
    prefix: tuple
    body: Formula


def _un_equiv(g: Formula):
    """Destructure the fixed biconditional expansion ~((X->Y) -> ~(Y->X))."""
    if (
        isinstance(g, Not)
        and isinstance(g.body, Implies)
        and isinstance(g.body.left, Implies)
        and isinstance(g.body.right, Not)
        and isinstance(g.body.right.body, Implies)
    ):
        fwd = g.body.left
        bwd = g.body.right.body
        if fwd.left is bwd.right and fwd.right is bwd.left:
            return fwd.left, fwd.right
    return None


def _un_conj(g: Formula):
    """Destructure the fixed conjunction expansion ~(X -> ~Y)."""
    if (
        isinstance(g, Not)
        and isinstance(g.body, Implies)
        and isinstance(g.body.right, Not)
    ):
        return g.body.left, g.body.right.body
    return None


def _core_schemas(g: Formula):
    """Schemas whose prefix-free shape g matches, Taut excluded."""
    out = []
    pair = _un_equiv(g)
    if pair is not None:
        x, y = pair
        both = _un_conj(x)
        if (
            both is not None
            and isinstance(both[0], Justifies)
            and isinstance(both[1], Justifies)
            and isinstance(both[0].body, Implies)
            and isinstance(y, Justifies)
            and isinstance(y.term, App)
        ):
            ts, sa = both
            t = y.term
            if (
                t.left is ts.term
                and t.right is sa.term
                and t.annotation is sa.body
                and ts.body.left is sa.body
                and ts.body.right is y.body
            ):
                out.append("App")
        if isinstance(x, Update) and x.body is y and up_independent(x):
            out.append("Indep")
        if (
            isinstance(x, Update)
            and isinstance(x.body, Not)
            and isinstance(y, Not)
            and isinstance(y.body, Update)
            and y.body.announcement is x.announcement
            and y.body.body is x.body.body
        ):
            out.append("Funct")
        if (
            isinstance(x, Update)
            and isinstance(x.body, Implies)
            and isinstance(y, Implies)
            and isinstance(y.left, Update)
            and isinstance(y.right, Update)
            and y.left.announcement is x.announcement
            and y.right.announcement is x.announcement
            and y.left.body is x.body.left
            and y.right.body is x.body.right
        ):
            out.append("Norm")
    if (
        isinstance(g, Update)
        and isinstance(g.body, Justifies)
        and isinstance(g.body.term, Up)
        and g.body.term.body is g.announcement
        and g.body.body is g.announcement
    ):
        out.append("Up")
    if (
        isinstance(g, Implies)
        and isinstance(g.left, Justifies)
        and isinstance(g.left.term, Up)
        and isinstance(g.right, Update)
        and g.right.announcement is g.left.term.body
        and g.right.body is g.left
    ):
        out.append("Pers")
    return out


def match_axiom(f: Formula) -> list:
    """Every (schema, prefix split) under which f is an axiom instance.

    Each decomposition f = [C1]...[Ck]G with k >= 0 is tried against each
    schema; an empty result means f is not an axiom.
    """
    out = []
    for lead, g in prefix_splits(f):
        if taut_check(g):
            out.append(AxiomInstance("Taut", lead, g))
        for schema in _core_schemas(g):
            out.append(AxiomInstance(schema, lead, g))
    return out


# -- schema instance builders -------------------------------------------

def app_instance(t: Term, s: Term, a: Formula, b: Formula) -> Formula:
    return equiv(
        conj(Justifies(t, Implies(a, b)), Justifies(s, a)),
        Justifies(App(t, a, s), b),
    )


def indep_instance(c: Formula, a: Formula) -> Formula:
    boxed = Update(c, a)
    if not up_independent(boxed):
        raise ValueError("announced formula's own up-term occurs under the update")
    return equiv(boxed, a)


def funct_instance(c: Formula, a: Formula) -> Formula:
    return equiv(Update(c, Not(a)), Not(Update(c, a)))


def norm_instance(c: Formula, a: Formula, b: Formula) -> Formula:
    return equiv(Update(c, Implies(a, b)), Implies(Update(c, a), Update(c, b)))


def up_instance(a: Formula) -> Formula:
    return Update(a, Justifies(Up(a), a))


def pers_instance(a: Formula, b: Formula) -> Formula:
    claim = Justifies(Up(a), b)
    return Implies(claim, Update(a, claim))


# -- constant specifications ---------------------------------------------

def _peel_an(f: Formula):
    """Split [C1]...[Ck]c:A into (c, A); None if not of that shape."""
    g = f
    while isinstance(g, Update):
        g = g.body
    if isinstance(g, Justifies) and isinstance(g.term, Constant):
        return g.term, g.body
    return None


def _iterated_cs_shape(f: Formula) -> bool:
    """[tau1]c1 : [tau2]c2 : ... : A with n >= 0 and A an axiom."""
    g = f
    while True:
        if match_axiom(g):
            return True
        peeled = _peel_an(g)
        if peeled is None:
            return False
        g = peeled[1]


def cs_contains(cs: ConstantSpec, c: Constant, f: Formula) -> bool:
    """Whether the specification licenses c as a reason for f. In full
    mode every constant pairs with every formula of the iterated shape,
    which satisfies both closure clauses of axiomatic appropriateness."""
    if cs.mode == "empty":
        return False
    if cs.mode == "explicit":
        return (c, f) in cs.pairs
    return _iterated_cs_shape(f)


def validate_cs(cs: ConstantSpec) -> list:
    """Violation list; explicit pairs must pair constants with formulas of
    the iterated shape over an axiom core."""
    from .model import validate_cs_structure

    bad = validate_cs_structure(cs)
    if cs.mode == "explicit":
        for c, a in cs.pairs:
            if isinstance(a, Formula) and not _iterated_cs_shape(a):
                bad.append(
                    "paired formula %r is not built from an axiom by "
                    "prefixing and constant justification" % print_formula(a)
                )
    return bad


# -- proofs and checking --------------------------------------------------

@dataclass(frozen=True)
class ProofStep:
    formula: Formula
    rule: str  # "axiom" | "an" | "mp"
    schema: str = None
    constant: Constant = None
    premises: tuple = None


@dataclass(frozen=True)
class Proof:
    steps: tuple

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1].formula


@dataclass(frozen=True)
class CheckFailure:
    index: int  # 1-based step position
    reason: str

    def __str__(self):
        return "step %d: %s" % (self.index, self.reason)


def check_proof(p: Proof, cs: ConstantSpec):
    """None when every step is justified; otherwise the first failure."""
    if not p.steps:
        return CheckFailure(0, "a proof needs at least one step")
    for k, step in enumerate(p.steps, 1):
        if step.rule == "axiom":
            insts = match_axiom(step.formula)
            if not insts:
                return CheckFailure(k, "not an axiom instance")
            if step.schema is not None and all(i.schema != step.schema for i in insts):
                return CheckFailure(k, "not an instance of schema %s" % step.schema)
        elif step.rule == "an":
            peeled = _peel_an(step.formula)
            if peeled is None:
                return CheckFailure(
                    k, "necessitation step is not of the form [updates]c:A"
                )
            d, body = peeled
            if step.constant is not None and step.constant is not d:
                return CheckFailure(k, "declared constant does not occur in the step")
            if not cs_contains(cs, d, body):
                return CheckFailure(
                    k,
                    "pair (%s, %s) is not in the constant specification"
                    % (print_term(d), print_formula(body)),
                )
        elif step.rule == "mp":
            if (
                step.premises is None
                or len(step.premises) != 2
                or not all(isinstance(i, int) and 1 <= i < k for i in step.premises)
            ):
                return CheckFailure(k, "modus ponens needs two earlier step indices")
            i, j = step.premises
            fi = p.steps[i - 1].formula
            fj = p.steps[j - 1].formula
            ok = (isinstance(fj, Implies) and fj.left is fi and fj.right is step.formula) or (
                isinstance(fi, Implies) and fi.left is fj and fi.right is step.formula
            )
            if not ok:
                return CheckFailure(k, "modus ponens premises do not yield this formula")
        else:
            return CheckFailure(k, "unknown rule %r" % step.rule)
    return None


class ProofBuilder:
    """Accumulates steps; repeated formulas reuse their first derivation.
    Axiom steps are validated on insertion, so construction errors surface
    at the offending call rather than at check time."""

    def __init__(self):
        self._steps = []
        self._where = {}

    def _add(self, step: ProofStep) -> int:
        have = self._where.get(step.formula)
        if have is not None:
            return have
        self._steps.append(step)
        idx = len(self._steps)
        self._where[step.formula] = idx
        return idx

    def formula_at(self, idx: int) -> Formula:
        return self._steps[idx - 1].formula

    def axiom(self, f: Formula, schema: str = None) -> int:
        insts = match_axiom(f)
        if schema is None:
            if not insts:
                raise ValueError("%s is not an axiom instance" % print_formula(f))
        elif all(i.schema != schema for i in insts):
            raise ValueError(
                "%s is not an instance of schema %s" % (print_formula(f), schema)
            )
        return self._add(ProofStep(f, "axiom", schema=schema))

    def an(self, f: Formula) -> int:
        peeled = _peel_an(f)
        if peeled is None:
            raise ValueError("%s is not of the form [updates]c:A" % print_formula(f))
        return self._add(ProofStep(f, "an", constant=peeled[0]))

    def mp(self, premise: int, implication: int) -> int:
        fi = self.formula_at(premise)
        fj = self.formula_at(implication)
        if not (isinstance(fj, Implies) and fj.left is fi):
            raise ValueError("step %d does not apply to step %d" % (implication, premise))
        return self._add(ProofStep(fj.right, "mp", premises=(premise, implication)))

    def taut_consequence(self, premise_indices, goal: Formula) -> int:
        """One Taut instance premise1 -> (... -> goal) plus a modus ponens
        per premise. Rejected unless goal is a boolean consequence."""
        formulas = [self.formula_at(i) for i in premise_indices]
        chain = goal
        for f in reversed(formulas):
            chain = Implies(f, chain)
        if not taut_check(chain):
            raise ValueError(
                "%s is not a tautological consequence of the premises"
                % print_formula(goal)
            )
        idx = self.axiom(chain, "Taut")
        for i in premise_indices:
            idx = self.mp(i, idx)
        return idx

    def proof(self) -> Proof:
        return Proof(tuple(self._steps))


# -- proof transformers ---------------------------------------------------

def _require_checked(p: Proof, cs: ConstantSpec):
    fail = check_proof(p, cs)
    if fail is not None:
        raise ValueError("input proof does not check: %s" % fail)


def prove_box(p: Proof, c: Formula, cs: ConstantSpec) -> Proof:
    """From a proof of A, a proof of [c]A.

    Axiom and necessitation steps absorb the new announcement into their
    prefix; each modus ponens is replayed under the box through a Norm
    instance."""
    _require_checked(p, cs)
    b = ProofBuilder()
    new = {}
    for k, step in enumerate(p.steps, 1):
        g = Update(c, step.formula)
        if step.rule == "axiom":
            new[k] = b.axiom(g, step.schema)
        elif step.rule == "an":
            new[k] = b.an(g)
        else:
            i, j = step.premises
            if not (
                isinstance(p.steps[j - 1].formula, Implies)
                and p.steps[j - 1].formula.left is p.steps[i - 1].formula
            ):
                i, j = j, i
            x = p.steps[i - 1].formula
            n = b.axiom(norm_instance(c, x, step.formula), "Norm")
            new[k] = b.taut_consequence([n, new[j], new[i]], g)
    return b.proof()


def _fresh_constant(f: Formula) -> Constant:
    used = constants_in(f)
    i = 1
    while i in used:
        i += 1
    return Constant(i)


def _an_witness(cs: ConstantSpec, f: Formula) -> Constant:
    """A constant the specification pairs with f."""
    if cs.mode == "full":
        return _fresh_constant(f)
    if cs.mode == "explicit":
        for d, a in cs.pairs:
            if a is f:
                return d
        raise ValueError(
            "constant specification has no witness for %s; an axiomatically "
            "appropriate specification (or full mode) is required" % print_formula(f)
        )
    raise ValueError("the empty constant specification cannot witness necessitation")


def prove_necessitation(p: Proof, cs: ConstantSpec):
    """From a proof of A, a term t and a proof of t:A.

    Axiom and necessitation steps take constant witnesses from the
    specification; each modus ponens becomes an application term, justified
    through an App instance."""
    _require_checked(p, cs)
    b = ProofBuilder()
    term = {}
    new = {}
    for k, step in enumerate(p.steps, 1):
        if step.rule in ("axiom", "an"):
            d = _an_witness(cs, step.formula)
            term[k] = d
            new[k] = b.an(Justifies(d, step.formula))
        else:
            i, j = step.premises
            if not (
                isinstance(p.steps[j - 1].formula, Implies)
                and p.steps[j - 1].formula.left is p.steps[i - 1].formula
            ):
                i, j = j, i
            x = p.steps[i - 1].formula
            u, v = term[j], term[i]
            goal = Justifies(App(u, x, v), step.formula)
            a = b.axiom(app_instance(u, v, x, step.formula), "App")
            term[k] = goal.term
            new[k] = b.taut_consequence([a, new[j], new[i]], goal)
    last = len(p.steps)
    return term[last], b.proof()


def _aux_steps(b: ProofBuilder, t: Term, s: Term, a: Formula, bf: Formula, c: Formula) -> int:
    """Derives [c]t:(a->bf) & [c]s:a <-> [c](t *[a] s):bf on the builder.

    One App instance under the announcement, then Funct and Norm instances
    push the box through each boolean layer of the biconditional; a single
    tautological consequence reassembles the goal."""
    x = Justifies(t, Implies(a, bf))
    y = Justifies(s, a)
    z = Justifies(App(t, a, s), bf)
    xy = conj(x, y)
    g = Implies(xy, z)
    h = Implies(z, xy)
    premises = [
        b.axiom(Update(c, app_instance(t, s, a, bf)), "App"),
        b.axiom(funct_instance(c, Implies(g, Not(h))), "Funct"),
        b.axiom(norm_instance(c, g, Not(h)), "Norm"),
        b.axiom(funct_instance(c, h), "Funct"),
        b.axiom(norm_instance(c, xy, z), "Norm"),
        b.axiom(funct_instance(c, Implies(x, Not(y))), "Funct"),
        b.axiom(norm_instance(c, x, Not(y)), "Norm"),
        b.axiom(funct_instance(c, y), "Funct"),
        b.axiom(norm_instance(c, z, xy), "Norm"),
    ]
    goal = equiv(conj(Update(c, x), Update(c, y)), Update(c, z))
    return b.taut_consequence(premises, goal)


def prove_aux(t: Term, s: Term, a: Formula, bf: Formula, c: Formula, cs: ConstantSpec) -> Proof:
    """Proof of [c]t:(a->bf) & [c]s:a <-> [c](t *[a] s):bf; with no
    announcement the statement is a bare App instance."""
    b = ProofBuilder()
    if c is None:
        b.axiom(app_instance(t, s, a, bf), "App")
    else:
        _aux_steps(b, t, s, a, bf, c)
    return b.proof()


def prove_ramsey(s: Term, c: Formula, a: Formula, cs: ConstantSpec) -> Proof:
    """Proof of s:(c->a) <-> [c](s *[c] up(c)):a.

    Announcing c makes up(c) justify c; applying s's conditional evidence
    to that inside the box yields a, and independence carries s:(c->a)
    itself across the announcement."""
    lhs = Justifies(s, Implies(c, a))
    if not up_independent(Update(c, lhs)):
        raise ValueError(
            "up(%s) occurs in %s: the boxed premise is not up-independent"
            % (print_formula(c), print_formula(lhs))
        )
    b = ProofBuilder()
    up_idx = b.axiom(up_instance(c), "Up")
    ind_idx = b.axiom(indep_instance(c, lhs), "Indep")
    aux_idx = _aux_steps(b, s, Up(c), c, a, c)
    goal = equiv(lhs, Update(c, Justifies(App(s, c, Up(c)), a)))
    b.taut_consequence([up_idx, ind_idx, aux_idx], goal)
    return b.proof()


def _justification_free(f: Formula) -> bool:
    return not any(isinstance(g, Justifies) for g in subformulas(f))


def prove_persistence_fo(t: Term, a: Formula, c: Formula, cs: ConstantSpec) -> Proof:
    """Proof of t:a -> [c]t:a for justification-free a.

    By recursion on t: up(c) itself is the Pers axiom; other atomic terms
    go through Indep; an application splits into its two component claims,
    each persisted inductively, and is reassembled under the box.

    Beyond the justification-free requirement on a, the recursion is only
    sound when every application annotation inside t is justification-free
    too, when up(c) is not an atomic subterm of any non-up(c) leaf, and
    when c itself is up-independent wherever an Indep leaf arises; these
    are enforced, not assumed.
    """
    if not _justification_free(a):
        raise ValueError("justified formula %s contains a justification" % print_formula(a))

    def scan(term: Term):
        if isinstance(term, App):
            if not _justification_free(term.annotation):
                raise ValueError(
                    "annotation %s contains a justification"
                    % print_formula(term.annotation)
                )
            scan(term.left)
            scan(term.right)
        elif not (isinstance(term, Up) and term.body is c):
            if Up(c) in atm(term):
                raise ValueError(
                    "up(%s) occurs inside the term %s, so independence fails"
                    % (print_formula(c), print_term(term))
                )
            if not up_independent(c):
                raise ValueError(
                    "announcement %s is not up-independent" % print_formula(c)
                )

    scan(t)
    b = ProofBuilder()

    def derive(term: Term, body: Formula) -> int:
        claim = Justifies(term, body)
        goal = Implies(claim, Update(c, claim))
        if isinstance(term, Up) and term.body is c:
            return b.axiom(goal, "Pers")
        if is_atomic(term):
            ind = b.axiom(indep_instance(c, claim), "Indep")
            return b.taut_consequence([ind], goal)
        left = derive(term.left, Implies(term.annotation, body))
        right = derive(term.right, term.annotation)
        app_idx = b.axiom(app_instance(term.left, term.right, term.annotation, body), "App")
        aux_idx = _aux_steps(b, term.left, term.right, term.annotation, body, c)
        return b.taut_consequence([app_idx, left, right, aux_idx], goal)

    derive(t, a)
    return b.proof()


# -- proof files -----------------------------------------------------------

_SCHEMA_TAGS = {s.lower(): s for s in SCHEMAS}
_STEP_KEYS = {"formula", "rule", "schema", "constant", "premises"}


def proof_from_json(obj) -> Proof:
    """Decode a proof file: a JSON array of steps with 1-based premise
    indices. Structural problems raise ValueError; whether the proof is
    correct is check_proof's business, not the decoder's."""
    if not isinstance(obj, list) or not obj:
        raise ValueError("a proof file is a nonempty JSON array of steps")
    steps = []
    for n, raw in enumerate(obj, 1):
        if not isinstance(raw, dict):
            raise ValueError("step %d must be a JSON object" % n)
        unknown = set(raw) - _STEP_KEYS
        if unknown:
            raise ValueError(
                "step %d has unknown keys: %s" % (n, ", ".join(sorted(unknown)))
            )
        if not isinstance(raw.get("formula"), str):
            raise ValueError("step %d needs a formula string" % n)
        try:
            f = parse_formula(raw["formula"])
        except SourceError as e:
            raise ValueError("step %d formula: %s" % (n, e.message))
        rule = raw.get("rule")
        if rule not in ("axiom", "an", "mp"):
            raise ValueError("step %d rule must be axiom, an, or mp" % n)
        schema = None
        if raw.get("schema") is not None:
            if rule != "axiom":
                raise ValueError("step %d: only axiom steps take a schema" % n)
            schema = _SCHEMA_TAGS.get(str(raw["schema"]).lower())
            if schema is None:
                raise ValueError("step %d names unknown schema %r" % (n, raw["schema"]))
        constant = None
        if raw.get("constant") is not None:
            if rule != "an":
                raise ValueError("step %d: only necessitation steps take a constant" % n)
            try:
                constant = parse_term(raw["constant"])
            except SourceError as e:
                raise ValueError("step %d constant: %s" % (n, e.message))
            if not isinstance(constant, Constant):
                raise ValueError("step %d constant must be a c<n> term" % n)
        premises = None
        if rule == "mp":
            raw_prem = raw.get("premises")
            if not (
                isinstance(raw_prem, list)
                and len(raw_prem) == 2
                and all(isinstance(i, int) for i in raw_prem)
            ):
                raise ValueError("step %d needs premises: [i, j]" % n)
            premises = tuple(raw_prem)
        elif raw.get("premises") is not None:
            raise ValueError("step %d: only modus ponens steps take premises" % n)
        steps.append(ProofStep(f, rule, schema=schema, constant=constant, premises=premises))
    return Proof(tuple(steps))


def proof_to_json(p: Proof) -> list:
    out = []
    for step in p.steps:
        entry = {"formula": print_formula(step.formula), "rule": step.rule}
        if step.schema is not None:
            entry["schema"] = step.schema.lower()
        if step.constant is not None:
            entry["constant"] = print_term(step.constant)
        if step.premises is not None:
            entry["premises"] = list(step.premises)
        out.append(entry)
    return out
