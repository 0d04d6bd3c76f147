"""The four-point variance lattice and its operations.

A variance describes how a type expression may legally respond to
subtyping in one of its variables:

* ``+``  (covariant)      — the expression preserves the direction;
* ``-``  (contravariant)  — the expression reverses the direction;
* ``=``  (invariant)      — only mutual subtyping is preserved;
* ``~``  (irrelevant)     — any two instantiations are related.

Each variance ``v`` denotes a relation between types, and the
information order ``leq`` compares variances by how much they promise:
``v leq w`` holds when every pair related under ``w``'s relation is also
related under ``v``'s.  That makes ``~`` the bottom (it relates
everything, so it promises nothing) and ``=`` the top, with ``+`` and
``-`` incomparable in between:

        =
       / \\
      +   -
       \\ /
        ~

Three binary operations drive everything else:

* ``compose(v, w)`` — the variance of a ``w``-position nested inside a
  ``v``-position (e.g. contravariant inside contravariant is covariant);
* ``glb`` / ``lub`` — lattice meet and join for the order above;
* ``zip_var(v, w)`` — a *partial* merge used when one variable must
  simultaneously serve two occurrences whose demands come from
  independent derivations.  It is defined exactly where ``lub`` can be
  taken without losing information: when either side is irrelevant, or
  both sides are invariant.  ``zip_var`` returns ``None`` where
  undefined; it never raises.

Contexts (finite maps from variable names to variances) and boxes
(finite maps from variable names to *sets* of variances, with absent
variables meaning "unconstrained") lift these operations pointwise.
"""

from __future__ import annotations

import enum
from typing import Dict, FrozenSet, Iterable, Optional

from .errors import StructureError


class Variance(enum.Enum):
    COV = "+"
    CONTRA = "-"
    INV = "="
    IRR = "~"

    @property
    def symbol(self) -> str:
        """The one-character surface syntax for this variance."""
        return self.value

    @property
    def json_name(self) -> str:
        """The name used in JSON reports (``~`` spells ``join``)."""
        return "join" if self is Variance.IRR else self.value

    def __repr__(self) -> str:  # pragma: no cover - debugging nicety
        return f"Variance({self.value!r})"


COV = Variance.COV
CONTRA = Variance.CONTRA
INV = Variance.INV
IRR = Variance.IRR

#: Canonical listing order, used for table printing and iteration.
ALL_VARIANCES: tuple[Variance, ...] = (INV, COV, CONTRA, IRR)

#: Tie-break order when picking a least element: bottom first, then the
#: two middle points, then top.
_PICK_ORDER: tuple[Variance, ...] = (IRR, COV, CONTRA, INV)

VarianceSet = FrozenSet[Variance]
FULL_SET: VarianceSet = frozenset(ALL_VARIANCES)
EMPTY_SET: VarianceSet = frozenset()

Context = Dict[str, Variance]
Box = Dict[str, VarianceSet]


# --------------------------------------------------------------------------
# The composition table.  Kept as explicit golden data rather than a
# formula: row v, column w gives the variance of a w-position nested
# inside a v-position.

_COMPOSE: dict[tuple[Variance, Variance], Variance] = {
    (INV, INV): INV, (INV, COV): INV, (INV, CONTRA): INV, (INV, IRR): IRR,
    (COV, INV): INV, (COV, COV): COV, (COV, CONTRA): CONTRA, (COV, IRR): IRR,
    (CONTRA, INV): INV, (CONTRA, COV): CONTRA, (CONTRA, CONTRA): COV, (CONTRA, IRR): IRR,
    (IRR, INV): IRR, (IRR, COV): IRR, (IRR, CONTRA): IRR, (IRR, IRR): IRR,
}


def compose(v: Variance, w: Variance) -> Variance:
    """Variance of a ``w``-position observed through a ``v``-position."""
    return _COMPOSE[(v, w)]


def leq(v: Variance, w: Variance) -> bool:
    """Information order: ``v``'s relation contains ``w``'s relation."""
    return v is w or v is IRR or w is INV


def glb(v: Variance, w: Variance) -> Variance:
    """Greatest lower bound in the information order."""
    if leq(v, w):
        return v
    if leq(w, v):
        return w
    return IRR


def lub(v: Variance, w: Variance) -> Variance:
    """Least upper bound in the information order."""
    if leq(v, w):
        return w
    if leq(w, v):
        return v
    return INV


def zip_var(v: Variance, w: Variance) -> Optional[Variance]:
    """Partial merge of two independent demands on one variable.

    Defined when either side is ``~`` (no demand) or both are ``=``;
    coincides with ``lub`` there.  Returns ``None`` where undefined.
    """
    if v is IRR:
        return w
    if w is IRR:
        return v
    if v is INV and w is INV:
        return INV
    return None


def up_set(v: Variance) -> VarianceSet:
    """All variances above ``v`` (inclusive) in the information order."""
    return frozenset(w for w in ALL_VARIANCES if leq(v, w))


def least_of(s: Iterable[Variance]) -> Variance:
    """Deterministically pick a least element of a non-empty set.

    If the set has a unique minimum this returns it; otherwise (the set
    ``{+, -}`` is the only antichain) the tie is broken by a fixed
    order, bottom-most first.
    """
    members = set(s)
    if not members:
        raise StructureError("least_of on an empty variance set")
    for v in _PICK_ORDER:
        if v in members and not any(
            leq(w, v) and w is not v for w in members
        ):
            return v
    # Unreachable: _PICK_ORDER starts at the bottom element.
    raise AssertionError("no minimal element found")


# --------------------------------------------------------------------------
# Contexts: total maps from a fixed variable set to variances.


def _require_same_domain(g1: Context, g2: Context) -> None:
    if g1.keys() != g2.keys():
        raise StructureError(
            f"context domain mismatch: {sorted(g1)} vs {sorted(g2)}"
        )


def context_leq(g1: Context, g2: Context) -> bool:
    """Pointwise ``leq`` over a shared domain."""
    _require_same_domain(g1, g2)
    return all(leq(g1[a], g2[a]) for a in g1)


def context_zip(g1: Context, g2: Context) -> Optional[Context]:
    """Pointwise ``zip_var``; ``None`` if undefined at any variable."""
    _require_same_domain(g1, g2)
    out: Context = {}
    for a in g1:
        z = zip_var(g1[a], g2[a])
        if z is None:
            return None
        out[a] = z
    return out


# --------------------------------------------------------------------------
# Boxes: per-variable variance sets.  A box stands for the set of
# contexts assigning each variable a member of its set; variables absent
# from the box are unconstrained (full set).


def box_get(box: Box, name: str) -> VarianceSet:
    return box.get(name, FULL_SET)


def box_is_empty(box: Box) -> bool:
    """True if the box denotes no context at all."""
    return any(not s for s in box.values())


def box_zip(b1: Box, b2: Box) -> Box:
    """All defined ``zip_var`` merges, pointwise.

    The result's entry for a variable may come out empty, which makes
    the whole box denote nothing; callers normalise such boxes away.
    """
    out: Box = {}
    for a in b1.keys() | b2.keys():
        s1, s2 = box_get(b1, a), box_get(b2, a)
        merged = frozenset(
            z for x in s1 for y in s2 if (z := zip_var(x, y)) is not None
        )
        out[a] = merged
    return out


def box_intersect(b1: Box, b2: Box) -> Box:
    """Pointwise intersection."""
    out: Box = {}
    for a in b1.keys() | b2.keys():
        out[a] = box_get(b1, a) & box_get(b2, a)
    return out


def box_subsumed(b1: Box, b2: Box) -> bool:
    """True if every context in ``b1`` is also in ``b2`` (pointwise ⊆)."""
    return all(
        box_get(b1, a) <= box_get(b2, a) for a in b1.keys() | b2.keys()
    )


def box_member(box: Box, g: Context) -> bool:
    """Does the context ``g`` fall inside the box?"""
    return all(g[a] in box_get(box, a) for a in g)
