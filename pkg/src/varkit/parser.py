"""Parser and pretty-printer for the ``.vt`` declaration format.

The format describes a signature on top of the pre-declared
constructors (``int``, ``q``, ``p``, ``->``, ``*``, ``list``,
``ref``)::

    # line comment
    base money noup
    axiom money <= int
    abstract irr(~a)
    type exp(+a) =
      | Val of exists b [a = b] . b
      | Int of [a = int] . int
      | Prod : exp(b) * exp(c) -> exp(b * c)

Variance annotations are ``+``, ``-``, ``=``, ``~``; constraint kinds
are ``=``, ``>=``, ``<=``, separated by commas.  The ``K : T ->
t(...)`` codomain form is sugar: its free variables become the
existentials (renamed ``_e0, _e1, …`` only when they collide with a
declared parameter name), each codomain argument becomes an equality
constraint, and the arrow's left-hand side becomes the constructor
argument.  An argument that itself contains an arrow must be
parenthesized in that form, since the outermost arrow is the split
point.

Parsing never raises: errors are collected as diagnostics (including
the well-formedness diagnostics of the resulting signature), and the
best-effort signature is returned alongside them.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Tuple

from .diagnostics import (
    Diagnostic,
    E_ARITY,
    E_DUPLICATE,
    E_SCOPE,
    E_SYNTAX,
    Span,
)
from .types import (
    App,
    ARROW,
    Constraint,
    ConstraintKind,
    ConstructorDecl,
    Kind,
    PRODUCT,
    Signature,
    TypeConDecl,
    TypeExpr,
    Var,
    default_signature,
    format_type,
    free_vars,
    make_signature,
    well_formed,
)
from .variance import Variance

_VARIANCE_SYMBOLS = {
    "+": Variance.COV,
    "-": Variance.CONTRA,
    "=": Variance.INV,
    "~": Variance.IRR,
}

_CONSTRAINT_SYMBOLS = {
    "=": ConstraintKind.EQ,
    ">=": ConstraintKind.SUP,
    "<=": ConstraintKind.SUB,
}

_KEYWORDS = ("base", "axiom", "abstract", "type")

# Longest first so the tokenizer prefers "->" over "-", ">=" over "=".
_SYMBOLS = ("->", ">=", "<=", "(", ")", "[", "]", ",", ".", "|", "=",
            "+", "-", "~", "*", ":")


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int) -> None:
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def span(self) -> Span:
        return Span(self.line, self.col, max(1, len(self.text)))


def _tokenize(source: str) -> Tuple[List[_Token], List[Diagnostic]]:
    tokens: List[_Token] = []
    diags: List[Diagnostic] = []
    line, col, i = 1, 1, 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token("name", source[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(_Token("sym", sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            diags.append(
                Diagnostic(
                    "error",
                    E_SYNTAX,
                    f"unexpected character {ch!r}",
                    Span(line, col),
                )
            )
            i += 1
            col += 1
    tokens.append(_Token("eof", "", line, col))
    return tokens, diags


class _ParseError(Exception):
    """Internal unwinding signal; converted to a Diagnostic at the top."""

    def __init__(self, diag: Diagnostic) -> None:
        super().__init__(diag.message)
        self.diag = diag


class _Parser:
    def __init__(self, tokens: List[_Token]) -> None:
        self.tokens = tokens
        self.pos = 0
        self.diags: List[Diagnostic] = []
        self.decls: Dict[str, TypeConDecl] = dict(
            default_signature().decls
        )
        self.axioms: List[Tuple[str, str]] = []
        self.order: List[str] = []

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "eof"

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            raise _ParseError(
                Diagnostic(
                    "error",
                    E_SYNTAX,
                    f"expected {text!r}, found {tok.text or 'end of file'!r}",
                    tok.span(),
                )
            )
        return self.next()

    def expect_name(self, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != "name":
            raise _ParseError(
                Diagnostic(
                    "error",
                    E_SYNTAX,
                    f"expected {what}, found {tok.text or 'end of file'!r}",
                    tok.span(),
                )
            )
        return self.next()

    def _recover(self) -> None:
        while self.peek().kind != "eof":
            if self.peek().kind == "name" and self.peek().text in _KEYWORDS:
                return
            self.next()

    # -- top level ---------------------------------------------------------

    def parse_all(self) -> None:
        while self.peek().kind != "eof":
            tok = self.peek()
            try:
                if tok.text == "base":
                    self.parse_base()
                elif tok.text == "axiom":
                    self.parse_axiom()
                elif tok.text == "abstract":
                    self.parse_abstract()
                elif tok.text == "type":
                    self.parse_datatype()
                else:
                    raise _ParseError(
                        Diagnostic(
                            "error",
                            E_SYNTAX,
                            "expected a declaration "
                            "(base, axiom, abstract, or type), "
                            f"found {tok.text!r}",
                            tok.span(),
                        )
                    )
            except _ParseError as err:
                self.diags.append(err.diag)
                self._recover()

    def _add_decl(self, decl: TypeConDecl, tok: _Token) -> None:
        if decl.name in self.decls:
            self.diags.append(
                Diagnostic(
                    "error",
                    E_DUPLICATE,
                    f"'{decl.name}' is already declared",
                    tok.span(),
                )
            )
            return
        self.decls[decl.name] = decl
        self.order.append(decl.name)

    def _flags(self) -> Tuple[bool, bool]:
        up, down = True, True
        while self.peek().kind == "name" and self.peek().text in (
            "noup",
            "nodown",
        ):
            if self.next().text == "noup":
                up = False
            else:
                down = False
        return up, down

    def parse_base(self) -> None:
        self.expect("base")
        name = self.expect_name("a base type name")
        up, down = self._flags()
        self._add_decl(
            TypeConDecl(name.text, Kind.BASE, (), up, down), name
        )

    def parse_axiom(self) -> None:
        self.expect("axiom")
        lo = self.expect_name("a base type name")
        self.expect("<=")
        hi = self.expect_name("a base type name")
        self.axioms.append((lo.text, hi.text))

    def _params(self) -> Tuple[Tuple[Variance, ...], Tuple[str, ...]]:
        self.expect("(")
        variances: List[Variance] = []
        names: List[str] = []
        while True:
            tok = self.peek()
            if tok.text not in _VARIANCE_SYMBOLS:
                raise _ParseError(
                    Diagnostic(
                        "error",
                        E_SYNTAX,
                        "expected a variance annotation (+, -, =, ~), "
                        f"found {tok.text or 'end of file'!r}",
                        tok.span(),
                    )
                )
            variances.append(_VARIANCE_SYMBOLS[self.next().text])
            pname = self.expect_name("a parameter name")
            if pname.text in names:
                self.diags.append(
                    Diagnostic(
                        "error",
                        E_DUPLICATE,
                        f"duplicate parameter name '{pname.text}'",
                        pname.span(),
                    )
                )
            names.append(pname.text)
            if self.at(","):
                self.next()
                continue
            break
        self.expect(")")
        return tuple(variances), tuple(names)

    def parse_abstract(self) -> None:
        self.expect("abstract")
        name = self.expect_name("an abstract type name")
        variances, pnames = self._params()
        up, down = self._flags()
        self._add_decl(
            TypeConDecl(
                name.text,
                Kind.ABSTRACT,
                variances,
                up,
                down,
                param_names=pnames,
            ),
            name,
        )

    # -- type expressions --------------------------------------------------

    def parse_type(self, is_var: Callable[[str], bool]) -> TypeExpr:
        left = self._parse_product(is_var)
        if self.at("->"):
            self.next()
            right = self.parse_type(is_var)
            return App(ARROW, (left, right))
        return left

    def _parse_product(self, is_var: Callable[[str], bool]) -> TypeExpr:
        left = self._parse_atom(is_var)
        while self.at("*"):
            self.next()
            right = self._parse_atom(is_var)
            left = App(PRODUCT, (left, right))
        return left

    def _parse_atom(self, is_var: Callable[[str], bool]) -> TypeExpr:
        tok = self.peek()
        if tok.text == "(":
            self.next()
            inner = self.parse_type(is_var)
            self.expect(")")
            return inner
        name = self.expect_name("a type").text
        if self.at("("):
            self.next()
            args = [self.parse_type(is_var)]
            while self.at(","):
                self.next()
                args.append(self.parse_type(is_var))
            self.expect(")")
            return App(name, tuple(args))
        if is_var(name):
            return Var(name)
        return App(name)

    # -- datatypes ---------------------------------------------------------

    def parse_datatype(self) -> None:
        self.expect("type")
        name = self.expect_name("a datatype name")
        variances, pnames = self._params()
        self.expect("=")
        ctors: List[ConstructorDecl] = []
        seen: set = set()
        if self.at("|"):
            self.next()
        while True:
            ctor = self.parse_constructor(name.text, len(variances), pnames)
            if ctor.name in seen:
                self.diags.append(
                    Diagnostic(
                        "error",
                        E_DUPLICATE,
                        f"duplicate constructor '{ctor.name}'",
                        name.span(),
                    )
                )
            seen.add(ctor.name)
            ctors.append(ctor)
            if self.at("|"):
                self.next()
                continue
            break
        self._add_decl(
            TypeConDecl(
                name.text,
                Kind.DATATYPE,
                variances,
                constructors=tuple(ctors),
                param_names=pnames,
            ),
            name,
        )

    def parse_constructor(
        self, dt_name: str, arity: int, pnames: Tuple[str, ...]
    ) -> ConstructorDecl:
        kname = self.expect_name("a constructor name")
        if self.at(":"):
            self.next()
            return self._parse_codomain_form(
                kname.text, dt_name, arity, pnames
            )
        self.expect("of")
        evars: List[str] = []
        if self.at("exists"):
            self.next()
            while self.peek().kind == "name":
                evars.append(self.next().text)
        scope = set(evars)
        self.expect("[")
        constraints: List[Constraint] = []
        if not self.at("]"):
            while True:
                ptok = self.expect_name("a parameter name")
                if ptok.text not in pnames:
                    self.diags.append(
                        Diagnostic(
                            "error",
                            E_SCOPE,
                            f"'{ptok.text}' is not a parameter of "
                            f"'{dt_name}'",
                            ptok.span(),
                        )
                    )
                    index = 0
                else:
                    index = pnames.index(ptok.text)
                ktok = self.peek()
                if ktok.text not in _CONSTRAINT_SYMBOLS:
                    raise _ParseError(
                        Diagnostic(
                            "error",
                            E_SYNTAX,
                            "expected a constraint kind (=, >=, <=), "
                            f"found {ktok.text or 'end of file'!r}",
                            ktok.span(),
                        )
                    )
                kind = _CONSTRAINT_SYMBOLS[self.next().text]
                rhs = self.parse_type(scope.__contains__)
                constraints.append(Constraint(index, kind, rhs))
                if self.at(","):
                    self.next()
                    continue
                break
        self.expect("]")
        self.expect(".")
        argument = self.parse_type(scope.__contains__)
        return ConstructorDecl(
            kname.text, tuple(evars), tuple(constraints), argument
        )

    def _parse_codomain_form(
        self, kname: str, dt_name: str, arity: int, pnames: Tuple[str, ...]
    ) -> ConstructorDecl:
        start = self.peek()

        def is_var(name: str) -> bool:
            return name not in self.decls and name != dt_name

        full = self.parse_type(is_var)
        if not (isinstance(full, App) and full.con == ARROW):
            raise _ParseError(
                Diagnostic(
                    "error",
                    E_SYNTAX,
                    f"constructor '{kname}' needs the form "
                    f"'argument -> {dt_name}(...)'",
                    start.span(),
                )
            )
        argument, codomain = full.args
        if not (isinstance(codomain, App) and codomain.con == dt_name):
            raise _ParseError(
                Diagnostic(
                    "error",
                    E_SYNTAX,
                    f"constructor '{kname}' must end in the datatype "
                    f"'{dt_name}' (parenthesize an arrow argument)",
                    start.span(),
                )
            )
        if len(codomain.args) != arity:
            raise _ParseError(
                Diagnostic(
                    "error",
                    E_ARITY,
                    f"'{dt_name}' expects {arity} argument(s), "
                    f"found {len(codomain.args)}",
                    start.span(),
                )
            )
        order: List[str] = []
        for part in (argument, *codomain.args):
            for v in free_vars(part):
                if v not in order:
                    order.append(v)
        renames: Dict[str, str] = {}
        fresh = 0
        for v in order:
            if v in pnames:
                while True:
                    candidate = f"_e{fresh}"
                    fresh += 1
                    if candidate not in order and candidate not in renames.values():
                        break
                renames[v] = candidate

        def rename(t: TypeExpr) -> TypeExpr:
            if isinstance(t, Var):
                return Var(renames.get(t.name, t.name))
            return App(t.con, tuple(rename(a) for a in t.args))

        if renames:
            argument = rename(argument)
            codomain = rename(codomain)
            order = [renames.get(v, v) for v in order]
        constraints = tuple(
            Constraint(i, ConstraintKind.EQ, rhs)
            for i, rhs in enumerate(codomain.args)
        )
        return ConstructorDecl(kname, tuple(order), constraints, argument)


def parse(source: str) -> Tuple[Signature, List[Diagnostic]]:
    """Parse ``.vt`` text into a signature plus all diagnostics.

    The returned diagnostics include both syntax errors and the
    well-formedness findings for the parsed signature; an empty list
    means the signature is ready for checking.
    """
    tokens, diags = _tokenize(source)
    parser = _Parser(tokens)
    parser.parse_all()
    diags = diags + parser.diags
    try:
        sig = make_signature(
            list(parser.decls.values()), tuple(parser.axioms)
        )
    except Exception as err:  # duplicate names already diagnosed above
        diags.append(Diagnostic("error", E_DUPLICATE, str(err)))
        sig = default_signature()
    diags.extend(well_formed(sig))
    return sig, diags


# --------------------------------------------------------------------------
# Pretty-printing (the inverse direction, used for round-trip checks).

_PREDECLARED = tuple(default_signature().decls)


def _flags_text(decl: TypeConDecl) -> str:
    out = ""
    if not decl.upward_closed:
        out += " noup"
    if not decl.downward_closed:
        out += " nodown"
    return out


def _params_text(decl: TypeConDecl) -> str:
    names = decl.shown_param_names()
    inner = ", ".join(
        f"{v.symbol}{n}" for v, n in zip(decl.param_variances, names)
    )
    return f"({inner})"


def _constructor_text(
    ctor: ConstructorDecl, param_names: Tuple[str, ...]
) -> str:
    parts = []
    if ctor.existentials:
        parts.append("exists " + " ".join(ctor.existentials))
    cs = ", ".join(
        f"{param_names[c.param_index]} {c.kind.value} {format_type(c.rhs)}"
        for c in ctor.constraints
    )
    parts.append(f"[{cs}]")
    parts.append(".")
    parts.append(format_type(ctor.argument))
    return f"  | {ctor.name} of " + " ".join(parts)


def pretty(sig: Signature) -> str:
    """Render the non-predeclared part of a signature as ``.vt`` text."""
    lines: List[str] = []
    for name, decl in sig.decls.items():
        if name in _PREDECLARED:
            continue
        if decl.kind is Kind.BASE:
            lines.append(f"base {name}{_flags_text(decl)}")
        elif decl.kind is Kind.ABSTRACT:
            lines.append(
                f"abstract {name}{_params_text(decl)}{_flags_text(decl)}"
            )
        elif decl.kind is Kind.DATATYPE:
            lines.append(f"type {name}{_params_text(decl)} =")
            pnames = decl.shown_param_names()
            for ctor in decl.constructors:
                lines.append(_constructor_text(ctor, pnames))
    for lo, hi in sig.base_axioms:
        lines.append(f"axiom {lo} <= {hi}")
    return "\n".join(lines) + ("\n" if lines else "")
