"""Brute-force semantic ground truth for the syntactic judgments.

Everything here is defined by *bounded quantification over ground
types*: enumerate every type of constructor-nesting depth at most ``d``
over a signature, quantify universally over tuples from that universe,
and search existentially for witnesses in a slightly deeper universe
(the ``slack``).  Nothing in this module consults the syntactic
checker, so agreement between the two is evidence, not tautology.

The naive search spaces are astronomically large (the depth-4 universe
over the default signature plus one unary datatype has about a million
types), so the universal/existential loops are *directed*: instead of
filtering ``u^n`` products, candidate sets for "all supertypes of t",
"all subtypes of t", and "all assignments making rel(v, t(vars),
target) hold" are enumerated structurally from the syntax-directed
subtyping relation.  The directed enumerations are exactly equivalent
to the brute-force filters (the test suite cross-checks them on small
universes); they are an implementation of the same bounded semantics,
not a different semantics.

Two caveats are deliberate:

* equality constraints are solved by structural matching, while the
  defined semantics of ``=`` is mutual subtyping; the two coincide
  whenever the base-type axioms are antisymmetric, which all shipped
  corpora are.
* violation reporting is deterministic: the first counterexample in
  the documented enumeration order (instantiation tuples in universe
  order over the *support* variables — existentials that occur in some
  constraint or in the argument — with non-support variables pinned to
  the first universe element).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import CapExceeded, StructureError
from .subtype import SubtypeEngine
from .types import (
    App,
    Constraint,
    ConstraintKind,
    ConstructorDecl,
    GroundType,
    Kind,
    Signature,
    TypeConDecl,
    TypeExpr,
    Var,
    default_signature,
    format_type,
    free_vars,
)
from .variance import CONTRA, COV, INV, IRR, Context, Variance

DEFAULT_CAP = 2_000_000

_FLIP = {COV: CONTRA, CONTRA: COV, INV: INV, IRR: IRR}


# --------------------------------------------------------------------------
# Layered enumeration and directed candidate sets.


class CandidateEnum:
    """Layered type enumeration plus directed relation candidates.

    ``all_types(d)`` is every ground type of depth ≤ ``d`` over the
    signature, deduplicated, in a deterministic order (by depth, then
    declaration order, then argument combinations).  ``sups``/``subs``
    enumerate exactly the supertypes/subtypes of a given ground type
    within a depth bound, by structural recursion on the
    syntax-directed relation:

    * same-head: rebuild with each argument ranging over the candidate
      set demanded by that parameter's variance;
    * the built-in escape hatch between the p/q pair, in the
      appropriate direction;
    * strict base-axiom successors/predecessors for arity-0 bases.

    All results are interned so identity fast paths apply downstream.
    """

    def __init__(self, engine: SubtypeEngine, cap: int = DEFAULT_CAP) -> None:
        self.engine = engine
        self.sig = engine.sig
        self.cap = cap
        self._intern: Dict[GroundType, GroundType] = {}
        self._layers: List[List[GroundType]] = []
        self._flat: Dict[int, List[GroundType]] = {}
        self._count = 0
        self._sups: Dict[Tuple[GroundType, int], List[GroundType]] = {}
        self._subs: Dict[Tuple[GroundType, int], List[GroundType]] = {}
        self._equivs: Dict[Tuple[GroundType, int], List[GroundType]] = {}
        self._depth: Dict[GroundType, int] = {}
        succ: Dict[str, set] = {}
        pred: Dict[str, set] = {}
        for lo, hi in self.sig.base_axioms:
            succ.setdefault(lo, set()).add(hi)
            pred.setdefault(hi, set()).add(lo)
        self._base_succ = {k: self._reach(succ, k) for k in succ}
        self._base_pred = {k: self._reach(pred, k) for k in pred}

    @staticmethod
    def _reach(edges: Dict[str, set], start: str) -> Tuple[str, ...]:
        seen: List[str] = []
        stack = [start]
        while stack:
            n = stack.pop()
            for m in sorted(edges.get(n, ())):
                if m not in seen and m != start:
                    seen.append(m)
                    stack.append(m)
        return tuple(seen)

    def intern(self, t: GroundType) -> GroundType:
        hit = self._intern.get(t)
        if hit is not None:
            return hit
        self._intern[t] = t
        return t

    def type_depth(self, t: GroundType) -> int:
        d = self._depth.get(t)
        if d is None:
            if isinstance(t, Var):
                raise StructureError("depth of an open type")
            d = 1 + max((self.type_depth(a) for a in t.args), default=0)
            self._depth[t] = d
        return d

    def ensure_depth(self, d: int) -> None:
        while len(self._layers) < d:
            self._build_layer()

    def _build_layer(self) -> None:
        d = len(self._layers) + 1
        new: List[GroundType] = []
        if d == 1:
            for decl in self.sig.decls.values():
                if decl.arity == 0:
                    new.append(self.intern(App(decl.name)))
        else:
            prev_all = [t for layer in self._layers for t in layer]
            last = set(self._layers[-1])
            for decl in self.sig.decls.values():
                if decl.arity == 0:
                    continue
                for combo in itertools.product(prev_all, repeat=decl.arity):
                    if any(c in last for c in combo):
                        new.append(self.intern(App(decl.name, combo)))
        self._count += len(new)
        if self._count > self.cap:
            raise CapExceeded(self._count, self.cap)
        for t in new:
            self._depth[t] = d
        self._layers.append(new)

    def all_types(self, max_depth: int) -> List[GroundType]:
        flat = self._flat.get(max_depth)
        if flat is None:
            self.ensure_depth(max_depth)
            flat = [t for layer in self._layers[:max_depth] for t in layer]
            self._flat[max_depth] = flat
        return flat

    def member(self, t: GroundType, max_depth: int) -> bool:
        if isinstance(t, Var):
            return False
        try:
            decl = self.sig.constructor(t.con)
        except StructureError:
            return False
        if len(t.args) != decl.arity:
            return False
        if not all(self.member(a, max_depth - 1) for a in t.args):
            return False
        return self.type_depth(self.intern(t)) <= max_depth

    def sups(self, t: GroundType, max_depth: int) -> List[GroundType]:
        key = (t, max_depth)
        hit = self._sups.get(key)
        if hit is None:
            hit = self._relatives(t, max_depth, up=True)
            self._sups[key] = hit
        return hit

    def subs(self, t: GroundType, max_depth: int) -> List[GroundType]:
        key = (t, max_depth)
        hit = self._subs.get(key)
        if hit is None:
            hit = self._relatives(t, max_depth, up=False)
            self._subs[key] = hit
        return hit

    def equivs(self, t: GroundType, max_depth: int) -> List[GroundType]:
        key = (t, max_depth)
        hit = self._equivs.get(key)
        if hit is None:
            hit = [
                x for x in self.sups(t, max_depth)
                if self.engine.subtype(x, t)
            ]
            self._equivs[key] = hit
        return hit

    def _relatives(
        self, t: GroundType, max_depth: int, up: bool
    ) -> List[GroundType]:
        if max_depth < 1 or isinstance(t, Var):
            return []
        out: List[GroundType] = []
        seen: set = set()

        def add(x: GroundType) -> None:
            x = self.intern(x)
            if x not in seen:
                seen.add(x)
                out.append(x)

        decl = self.sig.constructor(t.con)
        pools: List[List[GroundType]] = []
        for a, w in zip(t.args, decl.param_variances):
            ww = w if up else _FLIP[w]
            pools.append(self.rel_right(ww, a, max_depth - 1))
        for combo in itertools.product(*pools):
            add(App(t.con, combo))
        if up:
            if decl.kind is Kind.BUILTIN_P:
                q = self._decl_of_kind(Kind.BUILTIN_Q)
                if q is not None:
                    add(App(q))
            elif decl.kind is Kind.BASE:
                for b in self._base_succ.get(t.con, ()):
                    add(App(b))
        else:
            if decl.kind is Kind.BUILTIN_Q:
                p = self._decl_of_kind(Kind.BUILTIN_P)
                if p is not None:
                    for y in self.all_types(max_depth - 1):
                        add(App(p, (y,)))
            elif decl.kind is Kind.BASE:
                for b in self._base_pred.get(t.con, ()):
                    add(App(b))
        return out

    def _decl_of_kind(self, kind: Kind) -> Optional[str]:
        for name, d in self.sig.decls.items():
            if d.kind is kind:
                return name
        return None

    def rel_right(
        self, v: Variance, a: GroundType, max_depth: int
    ) -> List[GroundType]:
        """All ``b`` of depth ≤ ``max_depth`` with ``rel(v, a, b)``."""
        if v is COV:
            return self.sups(a, max_depth)
        if v is CONTRA:
            return self.subs(a, max_depth)
        if v is INV:
            return self.equivs(a, max_depth)
        return self.all_types(max_depth)

    def rel_left(
        self, v: Variance, b: GroundType, max_depth: int
    ) -> List[GroundType]:
        """All ``a`` of depth ≤ ``max_depth`` with ``rel(v, a, b)``."""
        return self.rel_right(_FLIP[v], b, max_depth)

    def subst(self, t: TypeExpr, env: Dict[str, GroundType]) -> GroundType:
        if isinstance(t, Var):
            return env[t.name]
        if not t.args:
            return self.intern(t)
        return self.intern(
            App(t.con, tuple(self.subst(a, env) for a in t.args))
        )


@dataclass
class Universe:
    """All ground types of depth ≤ ``depth`` over a signature.

    ``types`` is the materialized population in enumeration order.  A
    universe produced by :func:`deepen` shares its parent's candidate
    machinery but leaves ``types`` empty: it serves as a quantifier
    bound for directed searches without paying for materialization.
    """

    sig: Signature
    depth: int
    cap: int
    types: Tuple[GroundType, ...]
    engine: SubtypeEngine
    candidates: CandidateEnum

    def __contains__(self, t: GroundType) -> bool:
        return self.candidates.member(t, self.depth)

    def __len__(self) -> int:
        return len(self.types)


def enumerate_universe(
    sig: Signature, depth: int, cap: int = DEFAULT_CAP
) -> Universe:
    """Deterministically enumerate the depth-bounded ground types.

    Raises :class:`CapExceeded` (naming the offending count) if the
    population outgrows ``cap``.
    """
    engine = SubtypeEngine(sig)
    cands = CandidateEnum(engine, cap)
    cands.ensure_depth(depth)
    return Universe(
        sig, depth, cap, tuple(cands.all_types(depth)), engine, cands
    )


def deepen(u: Universe, extra: int) -> Universe:
    """A quantifier bound ``extra`` levels deeper, without materializing.

    The result shares ``u``'s enumeration caches; its ``types`` tuple
    is empty, so callers that iterate instantiations must supply them
    separately (see ``semantic_req``'s ``inst_universe``).
    """
    return Universe(u.sig, u.depth + extra, u.cap, (), u.engine, u.candidates)


# --------------------------------------------------------------------------
# Directed existential solver: assignments of ground types to the
# variables of a pattern realizing a conjunction of relations
# ``rel(v, pattern(vars), target)``.


class _Solver:
    """Search for variable assignments satisfying relation conditions.

    ``pools`` optionally restricts each variable's values (``None``
    means unrestricted up to the depth bound).  The search decomposes
    each condition along the syntax-directed relation, so every yielded
    binding satisfies its conditions exactly; unbound variables are
    genuinely unconstrained.
    """

    def __init__(
        self,
        cands: CandidateEnum,
        pools: Dict[str, Optional[List[GroundType]]],
        max_depth: int,
    ) -> None:
        self.cands = cands
        self.engine = cands.engine
        self.sig = cands.sig
        self.pools = pools
        self.max_depth = max_depth

    def _var_candidates(
        self, name: str, v: Variance, target: GroundType
    ) -> Iterator[GroundType]:
        pool = self.pools.get(name)
        if pool is None:
            yield from self.cands.rel_left(v, target, self.max_depth)
        else:
            for x in pool:
                if self.engine.rel(v, x, target):
                    yield x

    def _go(
        self,
        t: TypeExpr,
        v: Variance,
        target: GroundType,
        bnd: Dict[str, GroundType],
    ) -> Iterator[Dict[str, GroundType]]:
        if v is IRR:
            yield bnd
            return
        if isinstance(t, Var):
            cur = bnd.get(t.name)
            if cur is not None:
                if self.engine.rel(v, cur, target):
                    yield bnd
                return
            for x in self._var_candidates(t.name, v, target):
                out = dict(bnd)
                out[t.name] = x
                yield out
            return
        if v is INV:
            for b2 in self._go(t, COV, target, bnd):
                yield from self._go(t, CONTRA, target, b2)
            return
        decl = self.sig.constructor(t.con)
        tdecl = self.sig.constructor(target.con)
        if target.con == t.con:

            def seq(i: int, b: Dict[str, GroundType]) -> Iterator[Dict]:
                if i == len(t.args):
                    yield b
                    return
                w = decl.param_variances[i]
                ww = w if v is COV else _FLIP[w]
                for b2 in self._go(t.args[i], ww, target.args[i], b):
                    yield from seq(i + 1, b2)

            yield from seq(0, bnd)
        if v is COV:
            if decl.kind is Kind.BUILTIN_P and tdecl.kind is Kind.BUILTIN_Q:
                yield bnd
            elif (
                decl.kind is Kind.BASE
                and tdecl.kind is Kind.BASE
                and t.con != target.con
                and self.engine.base_leq(t.con, target.con)
            ):
                yield bnd
        else:
            if tdecl.kind is Kind.BUILTIN_P and decl.kind is Kind.BUILTIN_Q:
                yield bnd
            elif (
                decl.kind is Kind.BASE
                and tdecl.kind is Kind.BASE
                and t.con != target.con
                and self.engine.base_leq(target.con, t.con)
            ):
                yield bnd

    def solve(
        self,
        conditions: Sequence[Tuple[TypeExpr, Variance, GroundType]],
        seed: Dict[str, GroundType],
    ) -> Iterator[Dict[str, GroundType]]:
        """All bindings satisfying every condition, threading ``seed``."""

        def go_all(i: int, bnd: Dict[str, GroundType]) -> Iterator[Dict]:
            if i == len(conditions):
                yield bnd
                return
            t, v, target = conditions[i]
            for b2 in self._go(t, v, target, bnd):
                yield from go_all(i + 1, b2)

        yield from go_all(0, dict(seed))

    def first_total(
        self,
        conditions: Sequence[Tuple[TypeExpr, Variance, GroundType]],
        seed: Dict[str, GroundType],
        variables: Sequence[str],
        defaults: Dict[str, GroundType],
    ) -> Optional[Dict[str, GroundType]]:
        """First solution, extended to a total assignment on ``variables``.

        Variables left unbound by a solution are unconstrained by the
        conditions; they get their pool's first element, or their
        default value when unrestricted.
        """
        for bnd in self.solve(conditions, seed):
            out = dict(bnd)
            ok = True
            for name in variables:
                if name in out:
                    continue
                pool = self.pools.get(name)
                if pool is None:
                    out[name] = defaults[name]
                elif pool:
                    out[name] = pool[0]
                else:
                    ok = False
                    break
            if ok:
                return out
        return None


# --------------------------------------------------------------------------
# Semantic judgments.


def variance_counterexample(
    g: Context, t: TypeExpr, v: Variance, u: Universe
) -> Optional[Tuple[Tuple[GroundType, ...], Tuple[GroundType, ...]]]:
    """First refutation of the variance judgment within ``u``, or None.

    A refutation is a pair of instantiation tuples, pointwise related
    as ``g`` prescribes, whose ``t``-instances violate ``v``.
    """
    names = tuple(g.keys())
    cands = u.candidates
    for sigma in itertools.product(u.types, repeat=len(names)):
        env = dict(zip(names, sigma))
        inst = cands.subst(t, env)
        pools = [cands.rel_right(g[a], env[a], u.depth) for a in names]
        for sigma2 in itertools.product(*pools):
            env2 = dict(zip(names, sigma2))
            if not u.engine.rel(v, inst, cands.subst(t, env2)):
                return (sigma, sigma2)
    return None


def semantic_variance(
    g: Context, t: TypeExpr, v: Variance, u: Universe
) -> bool:
    """Bounded truth of the variance judgment: no refutation in ``u``."""
    return variance_counterexample(g, t, v, u) is None


def decomposability_counterexample(
    g: Context,
    t: TypeExpr,
    v: Variance,
    v2: Variance,
    u: Universe,
    slack: int = 1,
) -> Optional[Tuple[Tuple[GroundType, ...], GroundType]]:
    """First refutation of the decomposability judgment, or None.

    A refutation is an instantiation tuple from ``u`` together with a
    target type ``v``-related to its ``t``-instance (drawn from the
    depth ``+ slack`` universe) for which no re-instantiation —
    pointwise related to the original as ``g`` prescribes and drawn
    from the slack universe — makes the new instance ``v2``-related to
    the target.
    """
    names = tuple(g.keys())
    cands = u.candidates
    deep = u.depth + slack
    for rho in itertools.product(u.types, repeat=len(names)):
        env = dict(zip(names, rho))
        inst = cands.subst(t, env)
        pools: Dict[str, Optional[List[GroundType]]] = {
            a: (None if g[a] is IRR else cands.rel_right(g[a], env[a], deep))
            for a in names
        }
        solver = _Solver(cands, pools, deep)
        for target in cands.rel_right(v, inst, deep):
            found = solver.first_total([(t, v2, target)], {}, names, env)
            if found is None:
                return (rho, target)
    return None


def semantic_decomposability(
    g: Context,
    t: TypeExpr,
    v: Variance,
    v2: Variance,
    u: Universe,
    slack: int = 1,
) -> bool:
    """Bounded truth of the decomposability judgment."""
    return decomposability_counterexample(g, t, v, v2, u, slack) is None


# --------------------------------------------------------------------------
# The semantic acceptability criterion for datatype constructors.


@dataclass(frozen=True)
class Violation:
    """A concrete refutation of a constructor's acceptability.

    Instantiating the existentials with ``witnesses`` satisfies the
    constraints at parameters ``params``; the parameters can move to
    ``params_prime`` (related per the declared variances), but no
    re-instantiation within the slack universe satisfies the
    constraints at ``params_prime`` while keeping the argument type a
    supertype of the original.  Re-check with :func:`recheck_violation`.
    """

    datatype: str
    constructor: str
    params: Tuple[GroundType, ...]
    params_prime: Tuple[GroundType, ...]
    witnesses: Tuple[GroundType, ...]
    depth: int
    slack: int

    def describe(self) -> str:
        ps = ", ".join(format_type(x) for x in self.params)
        ps2 = ", ".join(format_type(x) for x in self.params_prime)
        ws = ", ".join(format_type(x) for x in self.witnesses)
        return (
            f"{self.datatype}.{self.constructor}: instantiation [{ws}] "
            f"inhabits parameters ({ps}); moving them to ({ps2}) strands "
            f"it (no witness within depth {self.depth + self.slack})"
        )


def _match(
    pattern: TypeExpr, target: GroundType, bnd: Dict[str, GroundType]
) -> Optional[Dict[str, GroundType]]:
    if isinstance(pattern, Var):
        cur = bnd.get(pattern.name)
        if cur is None:
            out = dict(bnd)
            out[pattern.name] = target
            return out
        return bnd if cur == target else None
    if isinstance(target, Var) or target.con != pattern.con:
        return None
    if len(target.args) != len(pattern.args):
        return None
    for p, x in zip(pattern.args, target.args):
        nxt = _match(p, x, bnd)
        if nxt is None:
            return None
        bnd = nxt
    return bnd


def _witness_exists(
    ctor: ConstructorDecl,
    constraints: Sequence[Constraint],
    params_prime: Tuple[GroundType, ...],
    env: Dict[str, GroundType],
    u: Universe,
    slack: int,
    arg_target: Optional[GroundType] = None,
) -> bool:
    """Is there a slack-universe re-instantiation for ``params_prime``?

    Equality constraints are solved by structural matching; inequality
    constraints and the argument-tracking condition are first tried on
    the cheap candidate that re-binds matched variables and keeps every
    other existential at its original value, then handed to the
    directed solver if that fails.  ``arg_target`` may pass in the
    already-substituted original argument type to avoid recomputing it
    across calls sharing one ``env``.
    """
    cands = u.candidates
    engine = u.engine
    deep = u.depth + slack
    bnd: Optional[Dict[str, GroundType]] = {}
    conditions: List[Tuple[TypeExpr, Variance, GroundType]] = []
    for c in constraints:
        target = params_prime[c.param_index]
        if c.kind is ConstraintKind.EQ:
            bnd = _match(c.rhs, target, bnd)
            if bnd is None:
                return False
        elif c.kind is ConstraintKind.SUP:
            conditions.append((c.rhs, COV, target))
        else:
            conditions.append((c.rhs, CONTRA, target))
    for val in bnd.values():
        if cands.type_depth(cands.intern(val)) > deep:
            return False
    if arg_target is None:
        arg_target = cands.subst(ctor.argument, env)
    conditions.append((ctor.argument, CONTRA, arg_target))
    trial = dict(env)
    trial.update(bnd)
    if all(
        engine.rel(v, cands.subst(rhs, trial), target)
        for rhs, v, target in conditions
    ):
        return True
    solver = _Solver(cands, {}, deep)
    return (
        solver.first_total(conditions, bnd, ctor.existentials, env)
        is not None
    )


def _free_moving(
    constraints: Sequence[Constraint], ctor: ConstructorDecl
) -> List[bool]:
    """Which constraints can always re-witness any parameter movement.

    A constraint whose right-hand side is a bare existential that
    occurs in no other constraint and not in the argument can track an
    arbitrary new parameter value by re-binding that variable alone,
    leaving every other condition untouched.  Such parameters are
    pinned during the search instead of enumerated; a violation can
    never hinge on them.
    """
    out: List[bool] = []
    for i, c in enumerate(constraints):
        free = False
        if isinstance(c.rhs, Var):
            x = c.rhs.name
            elsewhere = any(
                x in free_vars(d.rhs)
                for j, d in enumerate(constraints)
                if j != i
            )
            free = not elsewhere and x not in free_vars(ctor.argument)
        out.append(free)
    return out


def _subst_depth(
    cands: CandidateEnum, rhs: TypeExpr, env: Dict[str, GroundType]
) -> int:
    """Depth of ``subst(rhs, env)`` without building it."""
    if isinstance(rhs, Var):
        return cands.type_depth(env[rhs.name])
    return 1 + max(
        (_subst_depth(cands, a, env) for a in rhs.args), default=0
    )


def _pool_maybe_nonempty(
    cands: CandidateEnum,
    v: Variance,
    rhs: TypeExpr,
    env: Dict[str, GroundType],
    max_depth: int,
) -> bool:
    """Conservative emptiness test for ``rel_right(v, subst(rhs, env), d)``.

    Decides emptiness without building the substituted type: ``False``
    only when the pool is provably empty (a head position whose
    candidate pool is empty and no cross-head rule applies), possibly
    ``True`` for an empty pool.  Mirrors the disjuncts of
    ``CandidateEnum._relatives`` exactly, so a ``False`` here never
    skips a candidate the real enumeration would produce.
    """
    if v is IRR:
        return max_depth >= 1
    if v is INV:
        # An equivalence class never changes depth: mutual subtyping
        # decomposes same-head pointwise all the way down (no cross-head
        # rule holds in both directions), so equivalent types share one
        # skeleton.  The pool is non-empty exactly when the substituted
        # type itself fits the bound.
        return _subst_depth(cands, rhs, env) <= max_depth
    if isinstance(rhs, Var):
        return bool(cands.rel_right(v, env[rhs.name], max_depth))
    if max_depth < 1:
        return False
    decl = cands.sig.constructor(rhs.con)
    up = v is COV
    if up:
        if decl.kind is Kind.BUILTIN_P:
            return True
        if decl.kind is Kind.BASE and cands._base_succ.get(rhs.con):
            return True
    else:
        if decl.kind is Kind.BUILTIN_Q:
            return True
        if decl.kind is Kind.BASE and cands._base_pred.get(rhs.con):
            return True
    return all(
        _pool_maybe_nonempty(
            cands, w if up else _FLIP[w], a, env, max_depth - 1
        )
        for a, w in zip(rhs.args, decl.param_variances)
    )


def _req_constructor(
    datatype: str,
    ctor: ConstructorDecl,
    variances: Tuple[Variance, ...],
    u: Universe,
    slack: int,
    inst_types: Sequence[GroundType],
) -> Optional[Violation]:
    cands = u.candidates
    constraints = sorted(ctor.constraints, key=lambda c: c.param_index)
    free_move = _free_moving(constraints, ctor)
    evars = ctor.existentials
    # The enumeration support is the set of existentials occurring in
    # some constraint.  A variable occurring only in the argument type
    # cannot influence a violation: the parameters do not depend on it,
    # and the argument condition decomposes pointwise over the shared
    # skeleton (the subtype relation is syntax-directed and its only
    # cross-head rules relate *different* heads, which cannot appear on
    # both sides of a same-skeleton pair), so that variable's occurrence
    # conditions hold reflexively under the identity re-instantiation.
    # One representative value therefore suffices.
    used = set()
    for c in constraints:
        used.update(free_vars(c.rhs))
    support = tuple(b for b in evars if b in used)
    if not inst_types and evars:
        return None
    filler = inst_types[0] if inst_types else None
    env: Dict[str, GroundType] = {b: filler for b in evars}
    depth = u.depth

    # Per-parameter pools that must be non-empty for the inner loops to
    # see anything at all; checked cheaply before materializing.
    prechecks: List[Tuple[Variance, TypeExpr]] = []
    for c, free in zip(constraints, free_move):
        if c.kind is ConstraintKind.EQ:
            if not free:
                prechecks.append((variances[c.param_index], c.rhs))
        elif c.kind is ConstraintKind.SUP:
            prechecks.append((COV, c.rhs))
        else:
            prechecks.append((CONTRA, c.rhs))

    for rho_s in itertools.product(inst_types, repeat=len(support)):
        for b, val in zip(support, rho_s):
            env[b] = val
        if not all(
            _pool_maybe_nonempty(cands, v, rhs, env, depth)
            for v, rhs in prechecks
        ):
            continue
        sigma_pools: List[List[GroundType]] = []
        for c in constraints:
            inst = cands.subst(c.rhs, env)
            if c.kind is ConstraintKind.EQ:
                sigma_pools.append([inst])
            elif c.kind is ConstraintKind.SUP:
                sigma_pools.append(cands.sups(inst, depth))
            else:
                sigma_pools.append(cands.subs(inst, depth))
        arg_target: Optional[GroundType] = None
        for sigma in itertools.product(*sigma_pools):
            prime_pools = [
                [s] if free else cands.rel_right(v, s, depth)
                for v, s, free in zip(variances, sigma, free_move)
            ]
            for sigma2 in itertools.product(*prime_pools):
                if sigma2 == sigma:
                    continue
                if arg_target is None:
                    arg_target = cands.subst(ctor.argument, env)
                if not _witness_exists(
                    ctor, constraints, sigma2, env, u, slack, arg_target
                ):
                    return Violation(
                        datatype,
                        ctor.name,
                        sigma,
                        sigma2,
                        tuple(env[b] for b in evars),
                        u.depth,
                        slack,
                    )
    return None


def semantic_req(
    name: str,
    sig: Signature,
    u: Universe,
    slack: int = 1,
    inst_universe: Optional[Universe] = None,
) -> Optional[Violation]:
    """First violation of the semantic criterion for a datatype, or None.

    For every instantiation of each constructor's existentials (drawn
    from ``inst_universe`` if given, else ``u``), every parameter tuple
    satisfying the constraints, and every parameter tuple related to it
    per the declared variances, there must be a re-instantiation within
    the depth ``+ slack`` universe satisfying the constraints at the
    new parameters and keeping the argument type a supertype.
    """
    decl = sig.constructor(name)
    if decl.kind is not Kind.DATATYPE:
        raise StructureError(f"'{name}' is not a datatype")
    inst_types = (inst_universe or u).types
    for ctor in decl.constructors:
        hit = _req_constructor(
            name, ctor, decl.param_variances, u, slack, inst_types
        )
        if hit is not None:
            return hit
    return None


def recheck_violation(viol: Violation, sig: Signature) -> bool:
    """Re-establish a reported violation from scratch.

    Verifies the premises (the witnesses live within the claimed depth
    and satisfy the constraints at ``params``; the parameter tuples are
    related per the declared variances) and re-runs the witness search
    to confirm absence.  The parameter tuples themselves carry no depth
    bound: a substituted constraint right-hand side outgrows the depth
    of the values plugged into it, and the moved tuple is drawn from
    the slack-deepened pools, so bounding either would reject honest
    reports.
    """
    decl = sig.constructor(viol.datatype)
    ctor = next(
        (c for c in decl.constructors if c.name == viol.constructor), None
    )
    if ctor is None:
        return False
    if len(viol.witnesses) != len(ctor.existentials):
        return False
    u = enumerate_universe(sig, viol.depth)
    cands = u.candidates
    env = {
        b: cands.intern(w) for b, w in zip(ctor.existentials, viol.witnesses)
    }
    params = tuple(cands.intern(x) for x in viol.params)
    params2 = tuple(cands.intern(x) for x in viol.params_prime)
    if any(x not in u for x in env.values()):
        return False
    constraints = sorted(ctor.constraints, key=lambda c: c.param_index)
    for c in constraints:
        inst = cands.subst(c.rhs, env)
        s = params[c.param_index]
        if c.kind is ConstraintKind.EQ:
            if not (u.engine.subtype(inst, s) and u.engine.subtype(s, inst)):
                return False
        elif c.kind is ConstraintKind.SUP:
            if not u.engine.subtype(inst, s):
                return False
        else:
            if not u.engine.subtype(s, inst):
                return False
    if not u.engine.rel_tuple(decl.param_variances, params, params2):
        return False
    return not _witness_exists(
        ctor, constraints, params2, env, u, viol.slack
    )


# --------------------------------------------------------------------------
# Empirical closure probing.


def closure_probe(name: str, v: Variance, u: Universe) -> bool:
    """Scan ``u`` for evidence that a constructor's image is not closed.

    Returns False as soon as some instance of the constructor is
    ``v``-related (in the closure direction) to a type with a different
    head within ``u``'s depth bound; True if the scan finds none.
    """
    decl = u.sig.constructor(name)
    cands = u.candidates
    for args in itertools.product(u.types, repeat=decl.arity):
        inst = cands.intern(App(name, args))
        for other in cands.rel_right(v, inst, u.depth):
            if isinstance(other, App) and other.con != name:
                return False
    return True


# --------------------------------------------------------------------------
# Deterministic declaration stream for differential testing.


@dataclass(frozen=True)
class GenBounds:
    max_existentials: int = 2
    max_constraint_depth: int = 2
    max_argument_depth: int = 2
    max_constructors: int = 2


_GEN_EVARS = ("b", "c")
_GEN_ANNOTATIONS = (COV, CONTRA, INV, IRR)


def _random_type(
    rng: random.Random, evars: Tuple[str, ...], depth: int
) -> TypeExpr:
    # Variables weighted over ground atoms so that generated constraints
    # usually exercise the interesting (variable-tracking) paths.
    atoms: List[TypeExpr] = [Var(b) for b in evars for _ in range(3)]
    atoms += [App("int"), App("q")]
    if depth <= 1 or rng.random() < 0.3:
        return rng.choice(atoms)
    con = rng.choice(("p", "list", "ref", "->", "*", "*"))
    arity = 2 if con in ("->", "*") else 1
    return App(
        con, tuple(_random_type(rng, evars, depth - 1) for _ in range(arity))
    )


_GEN_KINDS = (
    ConstraintKind.EQ,
    ConstraintKind.EQ,
    ConstraintKind.EQ,
    ConstraintKind.EQ,
    ConstraintKind.SUP,
    ConstraintKind.SUB,
)


def generate_declarations(
    seed: int, bounds: GenBounds = GenBounds()
) -> Iterator[Tuple[Signature, Variance]]:
    """Deterministic stream of single-datatype signatures to check.

    Each generated shape is an arity-1 datatype over the default base
    signature, yielded once per parameter annotation.  Constraints are
    mostly equalities with a sprinkling of sup/sub kinds; generated
    types never mention the datatype itself, keeping the bounded
    witness searches tractable — recursion is exercised by the curated
    corpus instead.
    """
    rng = random.Random(seed)
    base = default_signature()
    while True:
        ctors = []
        for ci in range(rng.randint(1, bounds.max_constructors)):
            evars = _GEN_EVARS[: rng.choice((1, 1, 2, 2, 2))]
            evars = evars[: bounds.max_existentials]
            rhs = _random_type(
                rng, evars, rng.randint(1, bounds.max_constraint_depth)
            )
            if not free_vars(rhs):
                # One redraw to keep ground right-hand sides rare.
                rhs = _random_type(
                    rng, evars, rng.randint(1, bounds.max_constraint_depth)
                )
            arg = _random_type(
                rng, evars, rng.randint(1, bounds.max_argument_depth)
            )
            ctors.append(
                ConstructorDecl(
                    f"K{ci}",
                    evars,
                    (Constraint(0, rng.choice(_GEN_KINDS), rhs),),
                    arg,
                )
            )
        for ann in _GEN_ANNOTATIONS:
            decl = TypeConDecl(
                "t",
                Kind.DATATYPE,
                (ann,),
                constructors=tuple(ctors),
                param_names=("a",),
            )
            yield base.with_decl(decl), ann
