"""Structured diagnostics with stable machine-readable codes.

Codes starting with ``E_`` describe ill-formed input (syntax, arity,
scoping, ...); codes starting with ``R_`` describe a *rejection* of a
well-formed declaration by the soundness checker; ``W_`` codes are
warnings.  The code strings are part of the public interface and must
not change meaning between releases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

# -- input well-formedness -------------------------------------------------
E_SYNTAX = "E_SYNTAX"          # tokenizer / parser error
E_UNKNOWN = "E_UNKNOWN"        # reference to an undeclared constructor
E_ARITY = "E_ARITY"            # constructor applied to the wrong number of args
E_SCOPE = "E_SCOPE"            # variable out of scope for its position
E_CONSTRAINT = "E_CONSTRAINT"  # constraint list not in one-per-parameter form
E_AXIOM = "E_AXIOM"            # base axiom over non-base or undeclared names
E_DUPLICATE = "E_DUPLICATE"    # name declared twice in one scope

# -- checker rejections ----------------------------------------------------
R_VARIANCE = "R_VARIANCE"      # argument type cannot be covariant as required
R_CLOSURE = "R_CLOSURE"        # constraint type blocked by a non-closed head
R_ZIP = "R_ZIP"                # conflicting demands on one existential
R_SEMANTIC = "R_SEMANTIC"      # refuted by an enumerated counterexample

# -- warnings ---------------------------------------------------------------
W_INCONCLUSIVE = "W_INCONCLUSIVE"  # bounded oracle found no witness either way


@dataclass(frozen=True)
class Span:
    """1-based position of a token in the source text."""

    line: int
    col: int
    length: int = 1


@dataclass(frozen=True, eq=False)
class Diagnostic:
    severity: str                       # "error" | "warning"
    code: str                           # one of the constants above
    message: str
    span: Optional[Span] = None
    payload: Dict[str, Any] = field(default_factory=dict)

    def render(self, filename: str = "<input>") -> str:
        """One-line human-readable form, ``file:line:col: code message``."""
        if self.span is not None:
            where = f"{filename}:{self.span.line}:{self.span.col}"
        else:
            where = filename
        return f"{where}: {self.severity}[{self.code}] {self.message}"
