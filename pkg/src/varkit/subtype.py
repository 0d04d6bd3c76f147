"""Decision procedure for subtyping between ground types.

The relation is syntax-directed and therefore decidable by one
structural recursion:

* two applications of the *same* constructor are compared argument by
  argument, each position under the constructor's declared variance;
* ``p(t) <= q`` holds outright for the built-in pair ``p``/``q`` —
  this is the one rule that crosses constructor heads with a non-empty
  argument list, and the reason ``p`` is not upward closed;
* arity-0 base types are compared through the reflexive-transitive
  closure of the declared base axioms;
* nothing else is related.

Reflexivity and transitivity are consequences, not rules, so no search
is needed.  Results are memoized: the oracle issues millions of
repeated queries over a small universe of types.  The memo only grows
(entries are never invalidated) because signatures are immutable;
concurrent readers at worst recompute an entry.
"""

from __future__ import annotations

from typing import Dict, Iterable, Tuple

from .errors import StructureError
from .types import App, GroundType, Kind, Signature, TypeExpr, Var
from .variance import CONTRA, COV, INV, IRR, Context, Variance


def constructor_closed(sig: Signature, con: str, v: Variance) -> bool:
    """Is the image of ``con`` closed under the relation named by ``v``?

    Upward closure means every supertype of ``con(...)`` is again
    ``con``-headed; downward closure is the mirror image.  Invariance
    needs both directions but degenerates to equality of heads, so it
    always holds; irrelevance relates arbitrary types, so it never
    does.
    """
    if v is INV:
        return True
    if v is IRR:
        return False
    decl = sig.constructor(con)
    return decl.upward_closed if v is COV else decl.downward_closed


class SubtypeEngine:
    """Memoizing subtype oracle for one immutable signature."""

    def __init__(self, sig: Signature) -> None:
        self.sig = sig
        self._memo: Dict[Tuple[GroundType, GroundType], bool] = {}
        self._base_up: Dict[str, frozenset[str]] = self._close(sig.base_axioms)

    @staticmethod
    def _close(axioms: Iterable[Tuple[str, str]]) -> Dict[str, frozenset[str]]:
        succ: Dict[str, set[str]] = {}
        for lo, hi in axioms:
            succ.setdefault(lo, set()).add(hi)
        reach: Dict[str, frozenset[str]] = {}
        for start in succ:
            seen: set[str] = set()
            stack = [start]
            while stack:
                n = stack.pop()
                for m in succ.get(n, ()):
                    if m not in seen:
                        seen.add(m)
                        stack.append(m)
            reach[start] = frozenset(seen)
        return reach

    def base_leq(self, a: str, b: str) -> bool:
        """The declared order on arity-0 bases (reflexive-transitive)."""
        return a == b or b in self._base_up.get(a, ())

    def subtype(self, a: GroundType, b: GroundType) -> bool:
        if isinstance(a, Var) or isinstance(b, Var):
            raise StructureError("subtype is defined on ground types only")
        if a is b:
            return True
        key = (a, b)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        result = self._subtype(a, b)
        self._memo[key] = result
        return result

    def _subtype(self, a: App, b: App) -> bool:
        if a.con == b.con:
            decl = self.sig.constructor(a.con)
            return all(
                self.rel(w, x, y)
                for w, x, y in zip(decl.param_variances, a.args, b.args)
            )
        da = self.sig.constructor(a.con)
        db = self.sig.constructor(b.con)
        if da.kind is Kind.BUILTIN_P and db.kind is Kind.BUILTIN_Q:
            return True
        if da.kind is Kind.BASE and db.kind is Kind.BASE:
            return self.base_leq(a.con, b.con)
        return False

    def rel(self, v: Variance, a: GroundType, b: GroundType) -> bool:
        """The relation denoted by ``v``, applied to ``(a, b)``."""
        if v is IRR:
            return True
        if v is COV:
            return self.subtype(a, b)
        if v is CONTRA:
            return self.subtype(b, a)
        return self.subtype(a, b) and self.subtype(b, a)

    def rel_context(
        self,
        g: Context,
        xs: Tuple[GroundType, ...],
        ys: Tuple[GroundType, ...],
    ) -> bool:
        """Pointwise ``rel`` along the context's iteration order."""
        if len(xs) != len(g) or len(ys) != len(g):
            raise StructureError(
                f"rel_context arity mismatch: |g|={len(g)}, "
                f"|xs|={len(xs)}, |ys|={len(ys)}"
            )
        return all(
            self.rel(v, x, y) for v, x, y in zip(g.values(), xs, ys)
        )

    def rel_tuple(
        self,
        variances: Tuple[Variance, ...],
        xs: Tuple[GroundType, ...],
        ys: Tuple[GroundType, ...],
    ) -> bool:
        """Pointwise ``rel`` along an explicit variance tuple."""
        if not (len(variances) == len(xs) == len(ys)):
            raise StructureError("rel_tuple arity mismatch")
        return all(
            self.rel(v, x, y) for v, x, y in zip(variances, xs, ys)
        )

    def closed(self, con: str, v: Variance) -> bool:
        return constructor_closed(self.sig, con, v)
