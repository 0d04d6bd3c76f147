"""Command-line interface.

Subcommands::

    varkit check FILE [--json]            syntactic checking
    varkit oracle FILE --depth N          semantic checking by enumeration
                 [--slack K] [--cap M] [--json]
    varkit diff FILE --depth N            compare the two verdicts
                 [--slack K] [--cap M]
    varkit tables                         print the composition and zip tables
    varkit maxvar FILE TYPENAME           extremal accepted annotations

Exit codes: 0 success/agreement, 1 a declaration was rejected or a
violation was found, 2 usage/parse/well-formedness errors, 3 the
checker accepted something the oracle refutes.  ``VARKIT_COLOR=1``
forces ANSI colors on, ``VARKIT_COLOR=0`` (or unset) keeps output
plain.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .checker import CheckReport, check_constructor, check_datatype
from .diagnostics import Diagnostic, W_INCONCLUSIVE
from .errors import CapExceeded, VarkitError
from .oracle import DEFAULT_CAP, Violation, enumerate_universe, semantic_req
from .parser import parse
from .report import report_json
from .types import Kind, Signature, TypeConDecl, make_signature
from .variance import ALL_VARIANCES, Variance, leq, zip_var, compose


def _use_color() -> bool:
    return os.environ.get("VARKIT_COLOR", "0") == "1"


def _paint(text: str, color: str) -> str:
    if not _use_color():
        return text
    codes = {"red": "31", "green": "32", "yellow": "33"}
    return f"\x1b[{codes[color]}m{text}\x1b[0m"


def _print_diagnostics(diags: Sequence[Diagnostic], filename: str) -> None:
    for d in diags:
        line = d.render(filename)
        color = "red" if d.severity == "error" else "yellow"
        print(_paint(line, color), file=sys.stderr)


def _load(filename: str) -> Tuple[Optional[Signature], int]:
    """Parse a file; on any error print diagnostics and return (None, 2)."""
    try:
        with open(filename, "r", encoding="utf-8") as fh:
            source = fh.read()
    except OSError as err:
        print(f"varkit: {err}", file=sys.stderr)
        return None, 2
    sig, diags = parse(source)
    _print_diagnostics(diags, filename)
    if any(d.severity == "error" for d in diags):
        return None, 2
    return sig, 0


def _datatypes(sig: Signature) -> List[str]:
    return [
        name
        for name, decl in sig.decls.items()
        if decl.kind is Kind.DATATYPE
    ]


def _witness_text(report: CheckReport) -> str:
    if report.witness is None:
        return ""
    inner = ", ".join(f"{a}={v.symbol}" for a, v in report.witness.items())
    return f"  witness [{inner}]"


def _cmd_check(args: argparse.Namespace) -> int:
    sig, rc = _load(args.file)
    if sig is None:
        return rc
    reports: List[CheckReport] = []
    for name in _datatypes(sig):
        reports.extend(check_datatype(name, sig))
    if args.json:
        print(report_json(reports, args.file), end="")
    else:
        by_dt: Dict[str, List[CheckReport]] = {}
        for r in reports:
            by_dt.setdefault(r.datatype, []).append(r)
        for name, rs in by_dt.items():
            ok = all(r.accepted for r in rs)
            verdict = (
                _paint("ACCEPT", "green") if ok else _paint("REJECT", "red")
            )
            print(f"{name}: {verdict}")
            for r in rs:
                if r.accepted:
                    print(
                        f"  {r.constructor}: "
                        f"{_paint('ACCEPT', 'green')}{_witness_text(r)}"
                    )
                else:
                    f = r.failure
                    detail = f"  [{f.code}] {f.message}" if f else ""
                    print(
                        f"  {r.constructor}: "
                        f"{_paint('REJECT', 'red')}{detail}"
                    )
    return 0 if all(r.accepted for r in reports) else 1


def _run_oracle(
    sig: Signature, depth: int, slack: int, cap: int
) -> List[Tuple[str, Optional[Violation]]]:
    u = enumerate_universe(sig, depth, cap)
    return [
        (name, semantic_req(name, sig, u, slack=slack))
        for name in _datatypes(sig)
    ]


def _cmd_oracle(args: argparse.Namespace) -> int:
    sig, rc = _load(args.file)
    if sig is None:
        return rc
    try:
        results = _run_oracle(sig, args.depth, args.slack, args.cap)
    except CapExceeded as err:
        print(f"varkit: {err}", file=sys.stderr)
        return 2
    if args.json:
        print(
            report_json([v for _, v in results if v is not None], args.file),
            end="",
        )
    else:
        for name, viol in results:
            if viol is None:
                print(
                    f"{name}: {_paint('NO VIOLATION', 'green')} "
                    f"up to depth {args.depth} (slack {args.slack})"
                )
            else:
                print(
                    f"{name}: {_paint('VIOLATION', 'red')} {viol.describe()}"
                )
    return 0 if all(v is None for _, v in results) else 1


def _cmd_diff(args: argparse.Namespace) -> int:
    sig, rc = _load(args.file)
    if sig is None:
        return rc
    try:
        oracle_results = dict(
            _run_oracle(sig, args.depth, args.slack, args.cap)
        )
    except CapExceeded as err:
        print(f"varkit: {err}", file=sys.stderr)
        return 2
    mismatch = False
    for name in _datatypes(sig):
        accepted = all(r.accepted for r in check_datatype(name, sig))
        viol = oracle_results[name]
        if accepted and viol is not None:
            mismatch = True
            print(
                f"{name}: {_paint('MISMATCH', 'red')} checker accepted; "
                f"{viol.describe()}"
            )
        elif not accepted and viol is None:
            warning = Diagnostic(
                "warning",
                W_INCONCLUSIVE,
                f"checker rejected '{name}' but no violation exists "
                f"within depth {args.depth} (slack {args.slack}); "
                f"deeper enumeration may still find one",
            )
            _print_diagnostics([warning], args.file)
            print(f"{name}: inconclusive (reject, no finite witness)")
        elif accepted:
            print(f"{name}: agree ({_paint('accept', 'green')})")
        else:
            print(f"{name}: agree (reject, violation found)")
    return 3 if mismatch else 0


def tables_text() -> str:
    """The composition and zip tables, as printed by ``varkit tables``."""

    def table(title: str, cell) -> str:
        lines = [title, "     " + "  ".join(v.symbol for v in ALL_VARIANCES)]
        for v in ALL_VARIANCES:
            row = "  ".join(cell(v, w) for w in ALL_VARIANCES)
            lines.append(f"  {v.symbol}  {row}")
        return "\n".join(lines) + "\n"

    def zcell(v: Variance, w: Variance) -> str:
        z = zip_var(v, w)
        return z.symbol if z is not None else "."

    return (
        table("compose", lambda v, w: compose(v, w).symbol)
        + "\n"
        + table("zip", zcell)
    )


def _cmd_tables(_args: argparse.Namespace) -> int:
    print(tables_text(), end="")
    return 0


def maxvar_summary(
    sig: Signature, name: str
) -> List[Tuple[str, List[Variance], List[Variance], List[Variance]]]:
    """Per parameter: (name, accepted, maximal accepted, minimal accepted).

    Each annotation is tried with the datatype *redeclared* at the
    trial tuple, so recursive occurrences assume the same annotation
    being tested.
    """
    decl = sig.constructor(name)
    if decl.kind is not Kind.DATATYPE:
        raise VarkitError(f"'{name}' is not a datatype")
    out = []
    for i, pname in enumerate(decl.shown_param_names()):
        accepted: List[Variance] = []
        for v in ALL_VARIANCES:
            variances = tuple(
                v if j == i else w
                for j, w in enumerate(decl.param_variances)
            )
            trial = TypeConDecl(
                name=decl.name,
                kind=decl.kind,
                param_variances=variances,
                upward_closed=decl.upward_closed,
                downward_closed=decl.downward_closed,
                constructors=decl.constructors,
                param_names=decl.param_names,
            )
            decls = dict(sig.decls)
            decls[name] = trial
            trial_sig = make_signature(decls.values(), sig.base_axioms)
            if all(
                check_constructor(c, variances, trial_sig, name).accepted
                for c in decl.constructors
            ):
                accepted.append(v)
        maximal = [
            v
            for v in accepted
            if not any(leq(v, w) and w is not v for w in accepted)
        ]
        minimal = [
            v
            for v in accepted
            if not any(leq(w, v) and w is not v for w in accepted)
        ]
        out.append((pname, accepted, maximal, minimal))
    return out


def _cmd_maxvar(args: argparse.Namespace) -> int:
    sig, rc = _load(args.file)
    if sig is None:
        return rc
    try:
        rows = maxvar_summary(sig, args.typename)
    except VarkitError as err:
        print(f"varkit: {err}", file=sys.stderr)
        return 2

    def show(vs: List[Variance]) -> str:
        return "{" + ", ".join(v.symbol for v in vs) + "}"

    for pname, accepted, maximal, minimal in rows:
        if not accepted:
            print(f"{args.typename} parameter {pname}: nothing accepted")
            continue
        print(
            f"{args.typename} parameter {pname}: accepted {show(accepted)}; "
            f"maximal {show(maximal)}; minimal {show(minimal)}"
        )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="varkit",
        description="variance soundness checking for GADT declarations",
    )
    ap.add_argument(
        "--version", action="version", version=f"varkit {__version__}"
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="run the syntactic checker")
    p_check.add_argument("file")
    p_check.add_argument("--json", action="store_true")
    p_check.set_defaults(func=_cmd_check)

    p_oracle = sub.add_parser("oracle", help="run the semantic oracle")
    p_oracle.add_argument("file")
    p_oracle.add_argument("--depth", type=int, required=True)
    p_oracle.add_argument("--slack", type=int, default=1)
    p_oracle.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p_oracle.add_argument("--json", action="store_true")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_diff = sub.add_parser("diff", help="compare checker and oracle")
    p_diff.add_argument("file")
    p_diff.add_argument("--depth", type=int, required=True)
    p_diff.add_argument("--slack", type=int, default=1)
    p_diff.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p_diff.set_defaults(func=_cmd_diff)

    p_tables = sub.add_parser(
        "tables", help="print the composition and zip tables"
    )
    p_tables.set_defaults(func=_cmd_tables)

    p_maxvar = sub.add_parser(
        "maxvar", help="extremal accepted annotations per parameter"
    )
    p_maxvar.add_argument("file")
    p_maxvar.add_argument("typename")
    p_maxvar.set_defaults(func=_cmd_maxvar)

    return ap


def run_cli(argv: Sequence[str]) -> int:
    """Run one CLI invocation and return its exit code."""
    ap = _build_parser()
    try:
        args = ap.parse_args(list(argv))
    except SystemExit as err:
        # argparse exits 0 for --help/--version, 2 for usage errors.
        return int(err.code or 0)
    return args.func(args)


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
