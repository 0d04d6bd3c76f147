"""Variance-annotation soundness checking for GADT-style declarations.

The package decides, for a datatype whose parameters carry declared
variances (``+``, ``-``, ``=``, ``~``), whether each constructor's
existential constraints and argument type actually justify those
variances — and it ships its own adversary: a brute-force semantic
oracle that refutes or corroborates the syntactic checker by bounded
enumeration of ground types.

Typical entry points:

* :func:`parse` / :func:`pretty` — the ``.vt`` declaration format;
* :func:`check_datatype` — the syntactic acceptance criterion;
* :func:`enumerate_universe` / :func:`semantic_req` — the semantic
  ground truth at a given depth;
* ``python -m varkit`` or the ``varkit`` script — the CLI.
"""

__version__ = "0.1.0"

from .errors import CapExceeded, StructureError, VarkitError
from .diagnostics import Diagnostic, Span
from .variance import (
    ALL_VARIANCES,
    CONTRA,
    COV,
    INV,
    IRR,
    Variance,
    compose,
    glb,
    leq,
    lub,
    zip_var,
)
from .types import (
    App,
    Constraint,
    ConstraintKind,
    ConstructorDecl,
    Kind,
    Signature,
    TypeConDecl,
    TypeExpr,
    Var,
    default_signature,
    format_type,
    free_vars,
    make_signature,
    substitute,
    well_formed,
)
from .subtype import SubtypeEngine
from .checker import (
    BoxUnion,
    CheckReport,
    Failure,
    check_constructor,
    check_datatype,
    check_decomposability,
    check_variance,
    compile_constraint,
    decomp_boxes,
    min_context,
    verify_report,
)
from .oracle import (
    Universe,
    Violation,
    deepen,
    enumerate_universe,
    generate_declarations,
    recheck_violation,
    semantic_decomposability,
    semantic_req,
    semantic_variance,
)
from .parser import parse, pretty
from .report import report_document, report_json

__all__ = [
    "__version__",
    "ALL_VARIANCES",
    "App",
    "BoxUnion",
    "CapExceeded",
    "CheckReport",
    "Constraint",
    "ConstraintKind",
    "ConstructorDecl",
    "CONTRA",
    "COV",
    "deepen",
    "default_signature",
    "Diagnostic",
    "enumerate_universe",
    "Failure",
    "format_type",
    "free_vars",
    "generate_declarations",
    "glb",
    "INV",
    "IRR",
    "Kind",
    "leq",
    "lub",
    "make_signature",
    "min_context",
    "parse",
    "pretty",
    "recheck_violation",
    "report_document",
    "report_json",
    "semantic_decomposability",
    "semantic_req",
    "semantic_variance",
    "Signature",
    "Span",
    "StructureError",
    "substitute",
    "SubtypeEngine",
    "TypeConDecl",
    "TypeExpr",
    "Universe",
    "Var",
    "Variance",
    "VarkitError",
    "verify_report",
    "Violation",
    "well_formed",
    "zip_var",
    "check_constructor",
    "check_datatype",
    "check_decomposability",
    "check_variance",
    "compile_constraint",
    "compose",
    "decomp_boxes",
]
