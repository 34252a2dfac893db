"""Valuation over subset models, with announcement updates.

An EvalContext is a model plus a chain of announcements applied left to
right. Contexts form a tree rooted at the plain model; pushing an update
returns a cached child. Truth values are computed for all worlds at once
as integer bitmasks (bit i = the i-th world in file order) and memoized
per context, since the update recursion revisits the same formulas often.

Non-normal worlds read v1 for the whole formula, whatever its shape, so
their bits never depend on the chain. Normal worlds follow the recursive
clauses; justification by an application term s *[A] t is decided by the
two component claims s : (A -> B) and t : A, never by stored evidence.

Evidence for terms: pushing announcement C changes the entry for up(C)
only, intersecting it with C's truth set in the updated context (the
update is well-defined because up(C) cannot occur inside C, so
evaluating C never reads the entry being defined). All other terms,
application terms included, keep the value they had before the push;
application evidence bottoms out at the canonical maximal choice
E(s) & E(t) & wmp in the base model.
"""

from __future__ import annotations

from .model import ConstantSpec, SubsetModel, evidence_atomic, validate_model, wmp
from .syntax import (
    App,
    Formula,
    Implies,
    Justifies,
    Not,
    Prop,
    Term,
    Up,
    Update,
)

_BUSY = object()  # in-progress sentinel; hit only on a cyclic query


class EvalContext:
    """One node of the update tree. Do not mutate; push to extend."""

    __slots__ = (
        "base",
        "chain",
        "_parent",
        "_children",
        "_memo",
        "_eff",
        "_pos",
        "_normal_mask",
        "_full_mask",
        "_wmp_mask",
        "_nn",
        "_v0m",
    )

    def __init__(self, base: SubsetModel, _parent: "EvalContext" = None, _c: Formula = None):
        if _parent is None:
            bad = validate_model(base)
            if bad:
                raise ValueError("invalid model: " + "; ".join(bad))
            self.base = base
            self.chain = ()
            self._pos = {w: i for i, w in enumerate(base.worlds)}
            self._full_mask = (1 << len(base.worlds)) - 1
            self._normal_mask = self._mask(base.normal)
            self._wmp_mask = self._mask(wmp(base))
            nn = {}
            for (w, f), val in base.v1.items():
                if val:
                    nn[f] = nn.get(f, 0) | (1 << self._pos[w])
            self._nn = nn
            v0m = {}
            for (w, p), val in base.v0.items():
                if val:
                    v0m[p] = v0m.get(p, 0) | (1 << self._pos[w])
            self._v0m = v0m
        else:
            self.base = _parent.base
            self.chain = _parent.chain + (_c,)
            self._pos = _parent._pos
            self._full_mask = _parent._full_mask
            self._normal_mask = _parent._normal_mask
            self._wmp_mask = _parent._wmp_mask
            self._nn = _parent._nn
            self._v0m = _parent._v0m
        self._parent = _parent
        self._children = {}
        self._memo = {}
        self._eff = {}

    def _mask(self, worlds) -> int:
        out = 0
        for w in worlds:
            out |= 1 << self._pos[w]
        return out

    def push(self, c: Formula) -> "EvalContext":
        child = self._children.get(c)
        if child is None:
            child = EvalContext(self.base, self, c)
            self._children[c] = child
        return child

    def truth_mask(self, f: Formula) -> int:
        got = self._memo.get(f)
        if got is _BUSY:
            raise RuntimeError("cyclic evaluation of %r" % (f,))
        if got is None:
            self._memo[f] = _BUSY
            got = self._nn.get(f, 0) | (self._normal_mask & self._normal_part(f))
            self._memo[f] = got
        return got

    def _normal_part(self, f: Formula) -> int:
        if isinstance(f, Prop):
            return self._v0m.get(f.index, 0)
        if isinstance(f, Not):
            return ~self.truth_mask(f.body)
        if isinstance(f, Implies):
            return ~self.truth_mask(f.left) | self.truth_mask(f.right)
        if isinstance(f, Justifies):
            t = f.term
            if isinstance(t, App):
                return self.truth_mask(
                    Justifies(t.left, Implies(t.annotation, f.body))
                ) & self.truth_mask(Justifies(t.right, t.annotation))
            body = self.truth_mask(f.body)
            out = 0
            bit = 1
            for w in self.base.worlds:
                if bit & self._normal_mask and not self.evidence_mask(w, t) & ~body:
                    out |= bit
                bit <<= 1
            return out
        if isinstance(f, Update):
            return self.push(f.announcement).truth_mask(f.body)
        raise TypeError("expected a formula, got %r" % (f,))

    def evidence_mask(self, omega: str, t: Term) -> int:
        key = (omega, t)
        got = self._eff.get(key)
        if got is _BUSY:
            raise RuntimeError("cyclic evidence for %r" % (t,))
        if got is not None:
            return got
        self._eff[key] = _BUSY
        if self._parent is not None:
            last = self.chain[-1]
            if isinstance(t, Up) and t.body is last:
                got = self._parent.evidence_mask(omega, t) & self.truth_mask(last)
            else:
                got = self._parent.evidence_mask(omega, t)
        elif isinstance(t, App):
            got = (
                self.evidence_mask(omega, t.left)
                & self.evidence_mask(omega, t.right)
                & self._wmp_mask
            )
        else:
            got = self._mask(evidence_atomic(self.base, omega, t))
        self._eff[key] = got
        return got

    def unmask(self, mask: int) -> frozenset:
        return frozenset(w for w in self.base.worlds if mask & (1 << self._pos[w]))


def push_update(ctx: EvalContext, c: Formula) -> EvalContext:
    """Context extended by announcing c; worlds and valuations are shared."""
    return ctx.push(c)


def evaluate(ctx: EvalContext, omega: str, f: Formula) -> int:
    """Truth value in {0, 1} of f at a world under the context's chain."""
    pos = ctx._pos.get(omega)
    if pos is None:
        raise ValueError("unknown world %r" % omega)
    return (ctx.truth_mask(f) >> pos) & 1


def holds(ctx: EvalContext, omega: str, f: Formula) -> bool:
    return evaluate(ctx, omega, f) == 1


def truth_set(ctx: EvalContext, f: Formula) -> frozenset:
    """The set of worlds (normal and not) where f evaluates to 1."""
    return ctx.unmask(ctx.truth_mask(f))


def evidence_effective(ctx: EvalContext, omega: str, t: Term) -> frozenset:
    """Evidence set for any term at a normal world, after the whole chain."""
    if omega not in ctx.base.normal:
        raise ValueError("world %r is not normal" % omega)
    return ctx.unmask(ctx.evidence_mask(omega, t))


def cs_violations(ctx: EvalContext, universe) -> list:
    """(world, constant, formula) triples where constant evidence escapes
    the formula's truth set, in the given context."""
    bad = []
    for c, a in universe:
        target = ctx.truth_mask(a)
        for w in ctx.base.worlds:
            if w in ctx.base.normal and ctx.evidence_mask(w, c) & ~target:
                bad.append((w, c, a))
    return bad


def is_cs_model(m: SubsetModel, cs: ConstantSpec, universe=None) -> bool:
    """Whether every constant's evidence sits inside its paired formula's
    truth set. Explicit mode defaults the universe to the stored pairs;
    full mode pairs infinitely many formulas, so a finite universe of the
    pairs relevant to the queries at hand must be supplied."""
    if cs.mode == "empty":
        return True
    if universe is None:
        if cs.mode == "explicit":
            universe = cs.pairs
        else:
            raise ValueError("full mode needs a finite universe of pairs to check")
    return not cs_violations(EvalContext(m), universe)
