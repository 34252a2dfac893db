"""Object language: evidence terms and formulas with announcement updates.

Terms justify formulas; `up(A)` names the evidence produced by announcing A,
and `(s *[A] t)` applies an implication's evidence to a premise's evidence.
All nodes are interned: constructing the same shape twice returns the same
object, so equality is identity and hashing is O(1). Treat instances as
immutable.
"""

from __future__ import annotations

from typing import Iterator, Union

_pool: dict = {}


def _intern(cls, *args):
    key = (cls, args)
    node = _pool.get(key)
    if node is None:
        node = object.__new__(cls)
        node._args = args
        _pool[key] = node
    return node


class Term:
    """Base class for evidence terms."""

    __slots__ = ("_args",)

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, ", ".join(map(repr, self._args)))


class Formula:
    """Base class for formulas."""

    __slots__ = ("_args",)

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, ", ".join(map(repr, self._args)))


class Constant(Term):
    __slots__ = ()

    def __new__(cls, index: int):
        if index < 1:
            raise ValueError("constant index must be >= 1")
        return _intern(cls, index)

    @property
    def index(self) -> int:
        return self._args[0]


class Variable(Term):
    __slots__ = ()

    def __new__(cls, index: int):
        if index < 1:
            raise ValueError("variable index must be >= 1")
        return _intern(cls, index)

    @property
    def index(self) -> int:
        return self._args[0]


class Up(Term):
    """Announcement evidence: the term `up(A)` for an announcement A."""

    __slots__ = ()

    def __new__(cls, body: Formula):
        if not isinstance(body, Formula):
            raise TypeError("up() takes a formula")
        return _intern(cls, body)

    @property
    def body(self) -> Formula:
        return self._args[0]


class App(Term):
    """Application `(s *[A] t)`: evidence for A -> B applied to evidence for A."""

    __slots__ = ()

    def __new__(cls, left: Term, annotation: Formula, right: Term):
        if not (isinstance(left, Term) and isinstance(right, Term)):
            raise TypeError("application combines two terms")
        if not isinstance(annotation, Formula):
            raise TypeError("application annotation must be a formula")
        return _intern(cls, left, annotation, right)

    @property
    def left(self) -> Term:
        return self._args[0]

    @property
    def annotation(self) -> Formula:
        return self._args[1]

    @property
    def right(self) -> Term:
        return self._args[2]


class Prop(Formula):
    __slots__ = ()

    def __new__(cls, index: int):
        if index < 1:
            raise ValueError("proposition index must be >= 1")
        return _intern(cls, index)

    @property
    def index(self) -> int:
        return self._args[0]


class Not(Formula):
    __slots__ = ()

    def __new__(cls, body: Formula):
        return _intern(cls, body)

    @property
    def body(self) -> Formula:
        return self._args[0]


class Implies(Formula):
    __slots__ = ()

    def __new__(cls, left: Formula, right: Formula):
        return _intern(cls, left, right)

    @property
    def left(self) -> Formula:
        return self._args[0]

    @property
    def right(self) -> Formula:
        return self._args[1]


class Justifies(Formula):
    """`t : A`, the term t justifies the formula A."""

    __slots__ = ()

    def __new__(cls, term: Term, body: Formula):
        if not isinstance(term, Term):
            raise TypeError("justification needs a term on the left")
        return _intern(cls, term, body)

    @property
    def term(self) -> Term:
        return self._args[0]

    @property
    def body(self) -> Formula:
        return self._args[1]


class Update(Formula):
    """`[C] A`, the formula A after announcing C."""

    __slots__ = ()

    def __new__(cls, announcement: Formula, body: Formula):
        return _intern(cls, announcement, body)

    @property
    def announcement(self) -> Formula:
        return self._args[0]

    @property
    def body(self) -> Formula:
        return self._args[1]


Node = Union[Term, Formula]

# Update sequences are plain tuples of announcement formulas, applied left to
# right: prefix((C1, C2), A) is [C1][C2]A.
UpdateSequence = tuple


# Derived connectives are not part of the stored syntax. They expand to the
# fixed shapes below at construction or parse time; which expansion is chosen
# matters, because justification is hyperintensional (equivalent but distinct
# shapes are not interchangeable under `t :`).

def conj(a: Formula, b: Formula) -> Formula:
    """A and B, expanded as ~(A -> ~B)."""
    return Not(Implies(a, Not(b)))


def disj(a: Formula, b: Formula) -> Formula:
    """A or B, expanded as ~A -> B."""
    return Implies(Not(a), b)


def equiv(a: Formula, b: Formula) -> Formula:
    """A if and only if B, expanded as ~((A -> B) -> ~(B -> A))."""
    return Not(Implies(Implies(a, b), Not(Implies(b, a))))


def falsum() -> Formula:
    """Bottom, expanded as ~(P1 -> P1)."""
    p = Prop(1)
    return Not(Implies(p, p))


def is_atomic(t: Term) -> bool:
    """Constants, variables, and up-terms are atomic; applications are not."""
    return isinstance(t, (Constant, Variable, Up))


def atm(x: Node) -> frozenset:
    """The atomic subterms of a term or formula.

    An up-term counts as atomic itself but its announcement body is searched
    too, as are application annotations.
    """
    if isinstance(x, (Constant, Variable)):
        return frozenset((x,))
    if isinstance(x, Up):
        return frozenset((x,)) | atm(x.body)
    if isinstance(x, App):
        return atm(x.left) | atm(x.right) | atm(x.annotation)
    if isinstance(x, Prop):
        return frozenset()
    if isinstance(x, Not):
        return atm(x.body)
    if isinstance(x, Implies):
        return atm(x.left) | atm(x.right)
    if isinstance(x, Justifies):
        return atm(x.term) | atm(x.body)
    if isinstance(x, Update):
        return atm(x.body) | atm(x.announcement)
    raise TypeError("expected a term or formula, got %r" % (x,))


def subformulas(f: Formula) -> frozenset:
    """Reflexive subformulas, recursing through formula structure only.

    Formulas sitting inside terms (up bodies, application annotations) are
    term content: they contribute to atm but are not subformulas.
    """
    out = {f}
    if isinstance(f, Not):
        out |= subformulas(f.body)
    elif isinstance(f, Implies):
        out |= subformulas(f.left) | subformulas(f.right)
    elif isinstance(f, Justifies):
        out |= subformulas(f.body)
    elif isinstance(f, Update):
        out |= subformulas(f.announcement) | subformulas(f.body)
    return frozenset(out)


def up_independent(f: Formula) -> bool:
    """True when no announced formula's own up-term occurs under its update.

    Checks every subformula of the shape [C]B for up(C) in atm(B). The update
    axioms that commute announcements in and out of a formula are only sound
    under this restriction.
    """
    for g in subformulas(f):
        if isinstance(g, Update) and Up(g.announcement) in atm(g.body):
            return False
    return True


def length(x: Node) -> int:
    """Structural length; atomic terms count 1 regardless of their bodies."""
    if isinstance(x, Term):
        if is_atomic(x):
            return 1
        return length(x.left) + length(x.right) + length(x.annotation) + 1
    if isinstance(x, Prop):
        return 1
    if isinstance(x, Not):
        return length(x.body) + 1
    if isinstance(x, Implies):
        return length(x.left) + length(x.right) + 1
    if isinstance(x, Justifies):
        return length(x.term) + length(x.body) + 1
    if isinstance(x, Update):
        return length(x.announcement) + length(x.body) + 1
    raise TypeError("expected a term or formula, got %r" % (x,))


def prefix(updates, f: Formula) -> Formula:
    """Wrap f in a sequence of announcements: prefix((C1, C2), A) = [C1][C2]A."""
    out = f
    for c in reversed(tuple(updates)):
        out = Update(c, out)
    return out


def prefix_splits(f: Formula) -> Iterator[tuple]:
    """All decompositions f = [C1]...[Ck]G, k >= 0, outermost first.

    Yields (prefix, body) pairs starting with ((), f) and peeling one leading
    update at a time.
    """
    lead = []
    g = f
    yield (), g
    while isinstance(g, Update):
        lead.append(g.announcement)
        g = g.body
        yield tuple(lead), g


def eval_closure(f: Formula) -> frozenset:
    """Formulas whose truth can be consulted while evaluating f.

    Subformulas, plus the implication/premise split used to evaluate
    justification by an application term. Useful as a sparse-valuation
    support set: a world that valuates formulas directly only ever sees
    formulas from this closure.
    """
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, Implies):
            stack.extend((g.left, g.right))
        elif isinstance(g, Justifies):
            t = g.term
            if isinstance(t, App):
                stack.append(Justifies(t.left, Implies(t.annotation, g.body)))
                stack.append(Justifies(t.right, t.annotation))
            else:
                stack.append(g.body)
                if isinstance(t, Up):
                    stack.append(t.body)
        elif isinstance(g, Update):
            stack.extend((g.announcement, g.body))
    return frozenset(seen)


def constants_in(x: Node) -> frozenset:
    """Indices of all constants occurring anywhere in a term or formula."""
    out = set()
    for t in atm(x):
        if isinstance(t, Constant):
            out.add(t.index)
        elif isinstance(t, Up):
            out |= constants_in(t.body)
    return frozenset(out)


def prop_indices(x: Node) -> frozenset:
    """Indices of all propositions occurring anywhere, term content included."""
    if isinstance(x, Prop):
        return frozenset((x.index,))
    if isinstance(x, (Constant, Variable)):
        return frozenset()
    if isinstance(x, Up):
        return prop_indices(x.body)
    if isinstance(x, App):
        return prop_indices(x.left) | prop_indices(x.annotation) | prop_indices(x.right)
    if isinstance(x, Not):
        return prop_indices(x.body)
    if isinstance(x, Implies):
        return prop_indices(x.left) | prop_indices(x.right)
    if isinstance(x, Justifies):
        return prop_indices(x.term) | prop_indices(x.body)
    if isinstance(x, Update):
        return prop_indices(x.announcement) | prop_indices(x.body)
    raise TypeError("expected a term or formula, got %r" % (x,))
