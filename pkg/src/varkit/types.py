"""Type expressions, constructor declarations, and signatures.

The object language has first-order type expressions only: variables
and applications of named type constructors.  Function and product
types are not special syntax trees; ``->`` and ``*`` are ordinary
binary constructors whose declarations carry the usual variances
(contravariant/covariant domains for ``->``, covariant components for
``*``).  Keeping them uniform means every structural algorithm treats
them exactly like user-declared constructors.

Datatype constructors are stored in a normal form: every constructor of
an ``n``-parameter datatype binds a tuple of existential variables and
carries exactly one constraint per parameter position, each relating
that parameter to a type built from the existentials alone.  The
surface syntax ``K : T -> t(S1, ..., Sn)`` is desugared to this form by
the parser; :func:`encode_plain_constructor` does the same for plain
ADT clauses given programmatically.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from .diagnostics import (
    Diagnostic,
    E_ARITY,
    E_AXIOM,
    E_CONSTRAINT,
    E_DUPLICATE,
    E_SCOPE,
    E_UNKNOWN,
)
from .errors import StructureError
from .variance import COV, CONTRA, INV, Variance

ARROW = "->"
PRODUCT = "*"


# --------------------------------------------------------------------------
# Type expressions.  Structural equality with a cached hash: the oracle
# performs millions of dictionary operations on these.


@dataclass(frozen=True, eq=False, repr=False)
class Var:
    name: str

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return type(other) is Var and self.name == other.name

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(("Var", self.name))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True, eq=False, repr=False)
class App:
    con: str
    args: Tuple["TypeExpr", ...] = ()

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            type(other) is App
            and self.con == other.con
            and self.args == other.args
        )

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(("App", self.con, self.args))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        if self.args:
            return f"App({self.con!r}, {self.args!r})"
        return f"App({self.con!r})"


TypeExpr = Union[Var, App]

#: A ground type is a ``TypeExpr`` containing no ``Var`` nodes.  The
#: distinction is by convention, not by a separate class.
GroundType = TypeExpr


def is_ground(t: TypeExpr) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_ground(a) for a in t.args)


def free_vars(t: TypeExpr) -> Tuple[str, ...]:
    """Free variables in first-occurrence (left-to-right) order."""
    out: list[str] = []
    seen: set[str] = set()

    def walk(u: TypeExpr) -> None:
        if isinstance(u, Var):
            if u.name not in seen:
                seen.add(u.name)
                out.append(u.name)
        else:
            for a in u.args:
                walk(a)

    walk(t)
    return tuple(out)


def substitute(t: TypeExpr, assignment: Mapping[str, TypeExpr]) -> TypeExpr:
    """Replace every variable by its image; all free variables must be bound."""
    if isinstance(t, Var):
        try:
            return assignment[t.name]
        except KeyError:
            raise StructureError(f"unbound variable '{t.name}' in substitution")
    if not t.args:
        return t
    return App(t.con, tuple(substitute(a, assignment) for a in t.args))


def format_type(t: TypeExpr, prec: int = 0) -> str:
    """Render with the surface precedence: ``->`` < ``*`` < application.

    ``->`` is right-associative, ``*`` left-associative; parentheses are
    inserted exactly where re-parsing would otherwise change the tree.
    """
    if isinstance(t, Var):
        return t.name
    if t.con == ARROW and len(t.args) == 2:
        s = f"{format_type(t.args[0], 1)} -> {format_type(t.args[1], 0)}"
        return f"({s})" if prec > 0 else s
    if t.con == PRODUCT and len(t.args) == 2:
        s = f"{format_type(t.args[0], 1)} * {format_type(t.args[1], 2)}"
        return f"({s})" if prec > 1 else s
    if not t.args:
        return t.con
    inner = ", ".join(format_type(a, 0) for a in t.args)
    return f"{t.con}({inner})"


# --------------------------------------------------------------------------
# Declarations.


class Kind(enum.Enum):
    BUILTIN_P = "builtin_p"
    BUILTIN_Q = "builtin_q"
    BUILTIN_ARROW = "builtin_arrow"
    BUILTIN_PRODUCT = "builtin_product"
    BASE = "base"
    ABSTRACT = "abstract"
    DATATYPE = "datatype"


class ConstraintKind(enum.Enum):
    EQ = "="
    SUP = ">="
    SUB = "<="


@dataclass(frozen=True)
class Constraint:
    """One constraint ``param <kind> rhs`` on a datatype parameter.

    ``rhs`` mentions the constructor's existential variables only.
    """

    param_index: int
    kind: ConstraintKind
    rhs: TypeExpr


@dataclass(frozen=True)
class ConstructorDecl:
    name: str
    existentials: Tuple[str, ...]
    constraints: Tuple[Constraint, ...]
    argument: TypeExpr


@dataclass(frozen=True)
class TypeConDecl:
    name: str
    kind: Kind
    param_variances: Tuple[Variance, ...] = ()
    upward_closed: bool = True
    downward_closed: bool = True
    constructors: Tuple[ConstructorDecl, ...] = ()
    param_names: Tuple[str, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.param_variances)

    def shown_param_names(self) -> Tuple[str, ...]:
        if len(self.param_names) == self.arity:
            return self.param_names
        return tuple(f"a{i}" for i in range(self.arity))


@dataclass
class Signature:
    """All type constructor declarations plus the base-type order axioms.

    ``decls`` preserves declaration order.  ``base_axioms`` is a tuple
    of ``(lower, upper)`` pairs between arity-0 base constructors; its
    reflexive-transitive closure is computed by the subtyping engine.
    Construct through :func:`make_signature`, which keeps the closure
    flags consistent with the axioms (a base appearing on the left of
    an axiom is not upward closed, one on the right is not downward
    closed).
    """

    decls: Dict[str, TypeConDecl]
    base_axioms: Tuple[Tuple[str, str], ...] = ()

    def constructor(self, name: str) -> TypeConDecl:
        try:
            return self.decls[name]
        except KeyError:
            raise StructureError(f"undeclared type constructor '{name}'")

    def with_decl(self, decl: TypeConDecl) -> "Signature":
        """A new signature extending this one with one more declaration."""
        if decl.name in self.decls:
            raise StructureError(f"'{decl.name}' is already declared")
        out = dict(self.decls)
        out[decl.name] = decl
        return make_signature(out.values(), self.base_axioms)


def make_signature(
    decls: Iterable[TypeConDecl],
    base_axioms: Iterable[Tuple[str, str]] = (),
) -> Signature:
    table: Dict[str, TypeConDecl] = {}
    for d in decls:
        if d.name in table:
            raise StructureError(f"duplicate declaration of '{d.name}'")
        table[d.name] = d
    axioms = tuple(base_axioms)
    for lo, hi in axioms:
        if lo in table and table[lo].upward_closed:
            table[lo] = _clear_flag(table[lo], up=True)
        if hi in table and table[hi].downward_closed:
            table[hi] = _clear_flag(table[hi], up=False)
    return Signature(table, axioms)


def _clear_flag(d: TypeConDecl, up: bool) -> TypeConDecl:
    return TypeConDecl(
        name=d.name,
        kind=d.kind,
        param_variances=d.param_variances,
        upward_closed=False if up else d.upward_closed,
        downward_closed=d.downward_closed if up else False,
        constructors=d.constructors,
        param_names=d.param_names,
    )


def core_signature() -> Signature:
    """The four built-in constructors every signature starts from.

    ``p`` is a covariant unary constructor with an escape hatch: every
    ``p(t)`` is a subtype of the opaque base ``q``.  That makes ``p``
    not upward closed and ``q`` not downward closed, which is the
    canonical source of closure failures in examples and tests.
    """
    return make_signature(
        [
            TypeConDecl("q", Kind.BUILTIN_Q, (), True, False),
            TypeConDecl("p", Kind.BUILTIN_P, (COV,), False, True,
                        param_names=("a",)),
            TypeConDecl(ARROW, Kind.BUILTIN_ARROW, (CONTRA, COV), True, True,
                        param_names=("a", "b")),
            TypeConDecl(PRODUCT, Kind.BUILTIN_PRODUCT, (COV, COV), True, True,
                        param_names=("a", "b")),
        ]
    )


def default_signature() -> Signature:
    """Core constructors plus the stock base and container types."""
    sig = core_signature()
    decls = list(sig.decls.values()) + [
        TypeConDecl("int", Kind.BASE, (), True, True),
        TypeConDecl("list", Kind.ABSTRACT, (COV,), True, True,
                    param_names=("a",)),
        TypeConDecl("ref", Kind.ABSTRACT, (INV,), True, True,
                    param_names=("a",)),
    ]
    return make_signature(decls, sig.base_axioms)


def encode_plain_constructor(
    name: str, params: Tuple[str, ...], argument: TypeExpr
) -> ConstructorDecl:
    """Encode a plain ADT clause ``K : argument -> t(params)``.

    Each parameter becomes an equality constraint on a fresh
    existential, and the argument is rewritten over the fresh names.
    """
    fresh = tuple(f"_e{i}" for i in range(len(params)))
    renaming = {p: Var(f) for p, f in zip(params, fresh)}
    constraints = tuple(
        Constraint(i, ConstraintKind.EQ, Var(f)) for i, f in enumerate(fresh)
    )
    return ConstructorDecl(name, fresh, constraints, substitute(argument, renaming))


# --------------------------------------------------------------------------
# Well-formedness.


def well_formed(sig: Signature) -> list[Diagnostic]:
    """All structural problems in the signature, as diagnostics.

    An empty result means every algorithm in this package may assume:
    arities match, constraint lists are in one-per-parameter form,
    constraint and argument types close over the existentials, and
    base axioms relate declared arity-0 bases.
    """
    diags: list[Diagnostic] = []

    def err(code: str, message: str, **payload: object) -> None:
        diags.append(Diagnostic("error", code, message, None, dict(payload)))

    def check_expr(t: TypeExpr, scope: set[str], where: str) -> None:
        if isinstance(t, Var):
            if t.name not in scope:
                err(E_SCOPE, f"variable '{t.name}' is not in scope in {where}",
                    variable=t.name)
            return
        decl = sig.decls.get(t.con)
        if decl is None:
            err(E_UNKNOWN, f"unknown type constructor '{t.con}' in {where}",
                constructor=t.con)
        elif decl.arity != len(t.args):
            err(E_ARITY,
                f"'{t.con}' expects {decl.arity} argument(s), got "
                f"{len(t.args)} in {where}",
                constructor=t.con)
        for a in t.args:
            check_expr(a, scope, where)

    for d in sig.decls.values():
        if d.constructors and d.kind is not Kind.DATATYPE:
            err(E_CONSTRAINT,
                f"'{d.name}' is not a datatype but has constructors")
        seen_ctors: set[str] = set()
        for c in d.constructors:
            where = f"constructor '{c.name}' of '{d.name}'"
            if c.name in seen_ctors:
                err(E_DUPLICATE, f"duplicate constructor '{c.name}' in "
                    f"'{d.name}'")
            seen_ctors.add(c.name)
            scope = set()
            for b in c.existentials:
                if b in scope:
                    err(E_DUPLICATE,
                        f"existential '{b}' bound twice in {where}",
                        variable=b)
                scope.add(b)
            indices = [k.param_index for k in c.constraints]
            if sorted(indices) != list(range(d.arity)):
                err(E_CONSTRAINT,
                    f"{where} must constrain each parameter exactly once "
                    f"(got indices {sorted(indices)} for arity {d.arity})")
            for k in c.constraints:
                check_expr(k.rhs, scope, where)
            check_expr(c.argument, scope, where)

    for lo, hi in sig.base_axioms:
        for name in (lo, hi):
            d = sig.decls.get(name)
            if d is None:
                err(E_AXIOM, f"axiom mentions undeclared '{name}'")
            elif d.kind is not Kind.BASE or d.arity != 0:
                err(E_AXIOM,
                    f"axiom end '{name}' must be an arity-0 base type")

    return diags
