"""Syntactic soundness checking for (G)ADT constructor declarations.

Two judgments drive the check, both over a context ``G`` assigning a
variance to each existential variable:

* the **variance judgment** ``G |- t : v`` — whenever two
  instantiations of the existentials are pointwise related as ``G``
  prescribes, the corresponding instances of ``t`` are related as ``v``
  prescribes.  Derivable when every variable occurrence's composed
  demand is below the context's promise.

* the **decomposability judgment** ``G |- t : v ~> v'`` — whenever an
  instance of ``t`` is ``v``-related to some type ``s``, the
  instantiation can be *adjusted along G* so that the new instance is
  ``v'``-related to ``s``.  Its derivations are captured, exactly, by a
  finite union of boxes (per-variable variance sets): one box from the
  trivial rule (weaken ``v`` to ``v'`` and keep the instantiation), one
  from the variable rule (the variable absorbs the relation), and one
  box per combination of choices for the children when the head
  constructor's image is closed under ``v`` — child contexts must then
  merge via the partial ``zip_var``, since each child adjusts the same
  shared variables independently.

A constructor ``K of exists bs [cs] . arg`` of a datatype with declared
parameter variances is **accepted** when some context ``G`` over the
existentials simultaneously (a) makes ``arg`` covariant, and (b) splits
into per-constraint contexts ``G_i`` (via ``zip_var``) such that each
constraint's right-hand side satisfies the decomposability demand
compiled from the constraint kind and the parameter's declared
variance.  Acceptance reports carry the witness contexts; rejections
carry the first blocking requirement with a stable code:

* ``R_ZIP``      — two occurrences of one existential make conflicting,
                   un-mergeable demands;
* ``R_CLOSURE``  — a constraint type is blocked by a constructor whose
                   image is not closed under the required relation;
* ``R_VARIANCE`` — the merged demands contradict the covariance
                   requirement on the argument type.

Checking a recursive datatype uses the *declared* variances for
recursive occurrences (assumption style); no fixpoint is computed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .diagnostics import R_CLOSURE, R_VARIANCE, R_ZIP
from .errors import StructureError
from .subtype import constructor_closed
from .types import (
    App,
    Constraint,
    ConstraintKind,
    ConstructorDecl,
    Kind,
    Signature,
    TypeExpr,
    Var,
    format_type,
    free_vars,
)
from .variance import (
    Box,
    Context,
    CONTRA,
    COV,
    FULL_SET,
    INV,
    IRR,
    Variance,
    box_get,
    box_intersect,
    box_is_empty,
    box_member,
    box_subsumed,
    box_zip,
    compose,
    least_of,
    leq,
    lub,
    up_set,
    zip_var,
)

#: Deterministic member order inside a variance set (bottom-most first).
_SET_ORDER = (IRR, COV, CONTRA, INV)


def _ordered(s) -> list[Variance]:
    return [v for v in _SET_ORDER if v in s]


# --------------------------------------------------------------------------
# Variance judgment.


def check_variance(g: Context, t: TypeExpr, v: Variance, sig: Signature) -> bool:
    """Decide ``G |- t : v``.  Free variables of ``t`` must be in ``g``."""
    if isinstance(t, Var):
        try:
            w = g[t.name]
        except KeyError:
            raise StructureError(f"variable '{t.name}' missing from context")
        return leq(v, w)
    decl = sig.constructor(t.con)
    return all(
        check_variance(g, a, compose(v, w), sig)
        for a, w in zip(t.args, decl.param_variances)
    )


def min_context(
    t: TypeExpr,
    v: Variance,
    sig: Signature,
    variables: Optional[Sequence[str]] = None,
) -> Context:
    """The least context deriving ``G |- t : v``.

    Per variable, the join of the demands of its occurrences, each
    demand being ``v`` composed through the constructor parameters on
    the path.  Variables in ``variables`` that never occur get ``~``.
    """
    demands: Dict[str, Variance] = {}

    def walk(u: TypeExpr, vv: Variance) -> None:
        if isinstance(u, Var):
            demands[u.name] = lub(demands.get(u.name, IRR), vv)
        else:
            decl = sig.constructor(u.con)
            for a, w in zip(u.args, decl.param_variances):
                walk(a, compose(vv, w))

    walk(t, v)
    if variables is None:
        variables = free_vars(t)
    else:
        stray = set(demands) - set(variables)
        if stray:
            raise StructureError(
                f"free variables {sorted(stray)} outside the given universe"
            )
    return {a: demands.get(a, IRR) for a in variables}


# --------------------------------------------------------------------------
# Decomposability judgment.


@dataclass
class BoxUnion:
    """A finite union of boxes over a fixed variable universe.

    Denotes the set of contexts falling inside at least one box.
    Absent variables in a box are unconstrained.  ``normalized`` drops
    boxes with an empty component and boxes subsumed by another box;
    the result keeps the first representative of equal boxes, so it is
    deterministic in the construction order.
    """

    variables: Tuple[str, ...]
    boxes: List[Box] = field(default_factory=list)

    def normalized(self) -> "BoxUnion":
        kept: List[Box] = []
        for b in self.boxes:
            if box_is_empty(b):
                continue
            if any(box_subsumed(b, k) for k in kept):
                continue
            kept = [k for k in kept if not box_subsumed(k, b)]
            kept.append(b)
        return BoxUnion(self.variables, kept)

    def member(self, g: Context) -> bool:
        return any(box_member(b, g) for b in self.boxes)

    def is_empty(self) -> bool:
        return not self.boxes


def _zip_fold(choice: Sequence[Box]) -> Box:
    """The n-ary ``box_zip`` of the given boxes.

    Folded pairwise from the first box: an empty sequence denotes no
    requirement at all, i.e. the full box.  Seeding the fold with the
    full box instead would be wrong — ``zip_var(x, ~) = x`` would let
    the seed contribute arbitrary variances a single real box forbids.
    """
    if not choice:
        return {}
    acc = choice[0]
    for b in choice[1:]:
        acc = box_zip(acc, b)
    return acc


def decomp_boxes(
    t: TypeExpr,
    v: Variance,
    v2: Variance,
    sig: Signature,
    variables: Tuple[str, ...],
) -> BoxUnion:
    """All contexts deriving ``G |- t : v ~> v'``, as a normalized union.

    Construction mirrors the three inference rules:

    * trivial rule, applicable when ``v' leq v``: any context that
      makes ``t`` a ``v``-instance works, i.e. the up-closure of the
      minimal variance context;
    * variable rule: the context must promise exactly ``v`` for the
      variable (more would break the forward direction of adjustment,
      less the backward one);
    * constructor rule, applicable when the head's image is closed
      under ``v``: one box per choice of child boxes, merged with
      ``box_zip`` because the children adjust shared variables
      independently.
    """
    boxes: List[Box] = []
    if leq(v2, v):
        mc = min_context(t, v, sig, variables)
        boxes.append(
            {a: up_set(mc[a]) for a in variables if mc[a] is not IRR}
        )
    if isinstance(t, Var):
        boxes.append({t.name: frozenset((v,))})
    else:
        decl = sig.constructor(t.con)
        if constructor_closed(sig, t.con, v):
            unions = [
                decomp_boxes(a, compose(v, w), compose(v2, w), sig, variables)
                for a, w in zip(t.args, decl.param_variances)
            ]
            for choice in itertools.product(*(u.boxes for u in unions)):
                boxes.append(_zip_fold(choice))
    return BoxUnion(variables, boxes).normalized()


def check_decomposability(
    g: Context, t: TypeExpr, v: Variance, v2: Variance, sig: Signature
) -> bool:
    """Decide ``G |- t : v ~> v'`` by box membership."""
    return decomp_boxes(t, v, v2, sig, tuple(g.keys())).member(g)


# --------------------------------------------------------------------------
# The acceptance criterion for constructors.


def compile_constraint(
    kind: ConstraintKind, v_param: Variance
) -> Tuple[Variance, Variance]:
    """Decomposability demand ``(source, target)`` for one constraint.

    An equality constraint transmits the parameter's variance exactly
    and must be re-establishable invariantly.  Inequality constraints
    only transmit in one direction: when the parameter's variance
    already points that way the constraint type must track it
    covariantly (resp. contravariantly); otherwise nothing is known
    about the new parameter value and the source collapses to ``~``.
    Inequalities are sound-mode only: acceptance through them is sound
    but not known to be complete.
    """
    if kind is ConstraintKind.EQ:
        return (v_param, INV)
    if kind is ConstraintKind.SUP:
        src = COV if v_param in (COV, INV) else IRR
        return (src, COV)
    src = CONTRA if v_param in (CONTRA, INV) else IRR
    return (src, CONTRA)


@dataclass
class Failure:
    code: str                       # R_ZIP | R_CLOSURE | R_VARIANCE
    rule: str                       # name of the blocking requirement
    message: str
    variable: Optional[str] = None
    constraint_index: Optional[int] = None


@dataclass
class CheckReport:
    """Verdict for one constructor under given parameter variances.

    On acceptance ``witness`` is a context over the existentials and
    ``constraint_witnesses`` its per-constraint split (aligned with
    parameter order); together they are re-verifiable through
    :func:`verify_report`.  On rejection ``failure`` names the first
    blocking requirement.
    """

    datatype: str
    constructor: str
    variances: Tuple[Variance, ...]
    accepted: bool
    sound_mode: bool
    witness: Optional[Context] = None
    constraint_witnesses: Optional[Tuple[Context, ...]] = None
    failure: Optional[Failure] = None


def _closure_blind(sig: Signature) -> Signature:
    """The same signature with every closure flag raised.

    Used only for diagnosis: re-running a failed decomposition in a
    closure-blind signature separates "blocked by a non-closed head"
    from "blocked by conflicting variable demands".  Built directly so
    the axiom-driven flag clearing does not reapply.
    """
    decls = {
        name: d if (d.upward_closed and d.downward_closed) else
        type(d)(
            name=d.name,
            kind=d.kind,
            param_variances=d.param_variances,
            upward_closed=True,
            downward_closed=True,
            constructors=d.constructors,
            param_names=d.param_names,
        )
        for name, d in sig.decls.items()
    }
    return Signature(decls, sig.base_axioms)


def _first_closure_block(
    t: TypeExpr, v: Variance, sig: Signature
) -> Optional[Tuple[str, Variance]]:
    if isinstance(t, Var):
        return None
    if not constructor_closed(sig, t.con, v):
        return (t.con, v)
    decl = sig.constructor(t.con)
    for a, w in zip(t.args, decl.param_variances):
        hit = _first_closure_block(a, compose(v, w), sig)
        if hit is not None:
            return hit
    return None


def _repeated_var(t: TypeExpr) -> Optional[str]:
    counts: Dict[str, int] = {}

    def walk(u: TypeExpr) -> None:
        if isinstance(u, Var):
            counts[u.name] = counts.get(u.name, 0) + 1
        else:
            for a in u.args:
                walk(a)

    walk(t)
    for name, n in counts.items():
        if n > 1:
            return name
    return next(iter(counts), None)


def _split_witness(
    choice: Tuple[Box, ...], witness: Context, evars: Tuple[str, ...]
) -> Tuple[Context, ...]:
    """Back-propagate a merged witness into per-constraint contexts.

    For each variable, picks the first (in a fixed order) tuple of
    members of the chosen boxes whose ``zip_var`` fold equals the
    witness value.  Existence is guaranteed by construction of the
    fold.
    """
    parts: List[Context] = [{} for _ in choice]
    for a in evars:
        target = witness[a]
        pools = [_ordered(box_get(b, a)) for b in choice]
        for combo in itertools.product(*pools):
            acc: Optional[Variance] = IRR
            for x in combo:
                acc = zip_var(acc, x)
                if acc is None:
                    break
            if acc == target:
                for part, x in zip(parts, combo):
                    part[a] = x
                break
        else:
            raise AssertionError(
                f"no split reproduces witness {target} at '{a}'"
            )
    return tuple(parts)


def check_constructor(
    decl: ConstructorDecl,
    variances: Tuple[Variance, ...],
    sig: Signature,
    datatype: str = "",
) -> CheckReport:
    """Decide the acceptance criterion for one constructor.

    Searches for a choice of one box per constraint whose ``box_zip``
    fold, intersected with the argument's covariance box, is non-empty
    at every existential.  The first nonempty choice yields the
    witness (least variance per variable, bottom-biased on the one
    antichain); the first failing stage otherwise yields the report's
    failure.
    """
    evars = decl.existentials
    constraints = sorted(decl.constraints, key=lambda c: c.param_index)
    sound_mode = any(c.kind is not ConstraintKind.EQ for c in constraints)

    arg_min = min_context(decl.argument, COV, sig, evars)
    vbox: Box = {a: up_set(arg_min[a]) for a in evars}

    compiled = [
        compile_constraint(c.kind, variances[c.param_index])
        for c in constraints
    ]
    unions = [
        decomp_boxes(c.rhs, src, tgt, sig, evars)
        for c, (src, tgt) in zip(constraints, compiled)
    ]

    for i, (c, u, (src, tgt)) in enumerate(zip(constraints, unions, compiled)):
        if u.is_empty():
            failure = _diagnose_undecomposable(c, src, tgt, sig, evars)
            return CheckReport(
                datatype, decl.name, variances, False, sound_mode,
                failure=failure,
            )

    first_fold: Optional[Box] = None
    for choice in itertools.product(*(u.boxes for u in unions)):
        fold = _zip_fold(choice)
        if first_fold is None:
            first_fold = fold
        final = box_intersect(fold, vbox)
        if all(box_get(final, a) for a in evars):
            witness = {a: least_of(box_get(final, a)) for a in evars}
            return CheckReport(
                datatype, decl.name, variances, True, sound_mode,
                witness=witness,
                constraint_witnesses=_split_witness(choice, witness, evars),
            )

    # Rejected: diagnose against the first choice (deterministic).
    assert first_fold is not None or not evars
    fold = first_fold if first_fold is not None else {}
    for a in evars:
        if not box_get(fold, a):
            failure = Failure(
                R_ZIP, "zip",
                f"existential '{a}' receives un-mergeable variance demands "
                f"from different constraints",
                variable=a,
            )
            break
    else:
        a = next(
            x for x in evars if not (box_get(fold, x) & box_get(vbox, x))
        )
        failure = Failure(
            R_VARIANCE, "argument-covariance",
            f"existential '{a}' would need variance in "
            f"{sorted(x.symbol for x in box_get(fold, a))} for the "
            f"constraints, but the argument type requires at least "
            f"'{arg_min[a].symbol}'",
            variable=a,
        )
    return CheckReport(
        datatype, decl.name, variances, False, sound_mode, failure=failure
    )


def _diagnose_undecomposable(
    c: Constraint,
    src: Variance,
    tgt: Variance,
    sig: Signature,
    evars: Tuple[str, ...],
) -> Failure:
    blind = decomp_boxes(c.rhs, src, tgt, _closure_blind(sig), evars)
    if not blind.is_empty():
        hit = _first_closure_block(c.rhs, src, sig)
        con, vv = hit if hit is not None else ("?", src)
        return Failure(
            R_CLOSURE, "constructor-closure",
            f"constraint on parameter {c.param_index} requires adjusting "
            f"'{format_type(c.rhs)}' along '{vv.symbol}', but the image of "
            f"'{con}' is not closed in that direction",
            constraint_index=c.param_index,
        )
    variable = _repeated_var(c.rhs)
    return Failure(
        R_ZIP, "zip",
        f"constraint on parameter {c.param_index} makes conflicting "
        f"demands inside '{format_type(c.rhs)}'"
        + (f" (variable '{variable}')" if variable else ""),
        variable=variable,
        constraint_index=c.param_index,
    )


def check_datatype(name: str, sig: Signature) -> List[CheckReport]:
    """Check every constructor of a declared datatype."""
    decl = sig.constructor(name)
    if decl.kind is not Kind.DATATYPE:
        raise StructureError(f"'{name}' is not a datatype")
    return [
        check_constructor(c, decl.param_variances, sig, name)
        for c in decl.constructors
    ]


def verify_report(
    report: CheckReport, decl: ConstructorDecl, sig: Signature
) -> bool:
    """Re-verify an acceptance report from its witnesses alone.

    Checks, through the public judgment entry points, that the witness
    context makes the argument covariant, that it is the ``zip_var``
    fold of the per-constraint contexts (when there are constraints),
    and that each per-constraint context satisfies the compiled
    decomposability demand.  Rejection reports are not re-verifiable
    this way and return False.
    """
    if not report.accepted or report.witness is None:
        return False
    if report.constraint_witnesses is None:
        return False
    evars = decl.existentials
    g = report.witness
    if set(g) != set(evars):
        return False
    if not check_variance(g, decl.argument, COV, sig):
        return False
    constraints = sorted(decl.constraints, key=lambda c: c.param_index)
    parts = report.constraint_witnesses
    if len(parts) != len(constraints):
        return False
    if constraints:
        for a in evars:
            acc: Optional[Variance] = IRR
            for part in parts:
                acc = zip_var(acc, part[a])
                if acc is None:
                    return False
            if acc != g[a]:
                return False
    for c, part in zip(constraints, parts):
        src, tgt = compile_constraint(c.kind, report.variances[c.param_index])
        if not check_decomposability(part, c.rhs, src, tgt, sig):
            return False
    return True
