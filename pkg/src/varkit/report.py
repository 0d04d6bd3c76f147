"""JSON serialization of checker reports and oracle violations.

One document shape serves all commands::

    {
      "version": ...,
      "file": ...,
      "datatypes": [
        {
          "name": ...,
          "accepted": ...,
          "constructors": [
            {
              "name": ...,
              "accepted": ...,
              "witness_context": {"b": "+", ...},      # accepted only
              "failure": {                             # rejected only
                "code": ...,
                "variable": ...,                       # when known
                "rule": ...,                           # when known
                "oracle_violation": {...}              # when from the oracle
              }
            }
          ]
        }
      ]
    }

Key order is fixed as shown.  Variances serialize as ``"+"``, ``"-"``,
``"="``, and ``"join"``.  A mixed input list is merged per constructor:
an enumerated violation marks its constructor (and hence its datatype)
not accepted, overriding a syntactic acceptance — the counterexample is
the stronger evidence.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, List, Union

from . import __version__
from .checker import CheckReport
from .diagnostics import R_SEMANTIC
from .oracle import Violation
from .types import format_type


def _violation_obj(v: Violation) -> dict:
    return {
        "constructor": v.constructor,
        "params": [format_type(t) for t in v.params],
        "params_prime": [format_type(t) for t in v.params_prime],
        "witnesses": [format_type(t) for t in v.witnesses],
        "depth": v.depth,
        "slack": v.slack,
    }


def _report_entry(r: CheckReport) -> dict:
    entry: dict = {"name": r.constructor, "accepted": r.accepted}
    if r.accepted and r.witness is not None:
        entry["witness_context"] = {
            a: v.json_name for a, v in r.witness.items()
        }
    elif r.failure is not None:
        failure: dict = {"code": r.failure.code}
        if r.failure.variable is not None:
            failure["variable"] = r.failure.variable
        failure["rule"] = r.failure.rule
        entry["failure"] = failure
    return entry


def report_document(
    reports: Iterable[Union[CheckReport, Violation]],
    file: str = "<input>",
) -> dict:
    """The report as a plain dictionary (see the module docstring)."""
    datatypes: List[dict] = []
    by_name: Dict[str, dict] = {}

    def datatype_entry(name: str) -> dict:
        entry = by_name.get(name)
        if entry is None:
            entry = {"name": name, "accepted": True, "constructors": []}
            by_name[name] = entry
            datatypes.append(entry)
        return entry

    def constructor_entry(dt: dict, name: str) -> dict:
        for c in dt["constructors"]:
            if c["name"] == name:
                return c
        c = {"name": name, "accepted": True}
        dt["constructors"].append(c)
        return c

    for item in reports:
        if isinstance(item, CheckReport):
            dt = datatype_entry(item.datatype)
            dt["constructors"].append(_report_entry(item))
        else:
            dt = datatype_entry(item.datatype)
            entry = constructor_entry(dt, item.constructor)
            entry["accepted"] = False
            entry.pop("witness_context", None)
            failure = entry.setdefault("failure", {"code": R_SEMANTIC})
            failure["oracle_violation"] = _violation_obj(item)

    for dt in datatypes:
        dt["accepted"] = all(c["accepted"] for c in dt["constructors"])
    return {"version": __version__, "file": file, "datatypes": datatypes}


def report_json(
    reports: Iterable[Union[CheckReport, Violation]],
    file: str = "<input>",
) -> str:
    """Serialize reports and/or violations as a JSON document."""
    return json.dumps(report_document(reports, file), indent=2) + "\n"
