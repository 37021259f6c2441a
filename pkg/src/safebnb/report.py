"""JSON and CSV serialization of solver runs.

Non-finite numbers are written as the strings ``"inf"``, ``"-inf"`` and
``"nan"`` so that reports stay strict JSON.  ``REPORT_SCHEMA`` and
``TABLE_SCHEMA`` are JSON Schema documents describing both layouts.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

from .interval import Box, Interval
from .proof import Certificate
from .solver import SolveReport

__all__ = [
    "SCHEMA_VERSION",
    "SUMMARY_FIELDS",
    "REPORT_SCHEMA",
    "TABLE_SCHEMA",
    "encode_number",
    "decode_number",
    "summary_row",
    "report_to_dict",
    "report_to_json",
    "rows_to_csv",
    "rows_from_csv",
    "table_to_dict",
    "certificates_from_report",
]

SCHEMA_VERSION = 1

SUMMARY_FIELDS = (
    "problem",
    "strategy",
    "status",
    "L",
    "U",
    "certified_U",
    "unsafe",
    "nodes",
    "proof_attempts",
    "proof_successes",
    "lp_solves",
    "time_to_first_proven",
    "wall_time",
    "seed",
    "eps",
    "error",
)


def encode_number(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def decode_number(x):
    if x is None or x == "":
        return None
    return float(x)


def _interval(iv: Interval) -> list:
    return [encode_number(iv.lo), encode_number(iv.hi)]


def _box(b: Box) -> list:
    return [_interval(iv) for iv in b]


def summary_row(r: SolveReport | None, problem: str = "", strategy: str = "", error: str = "") -> dict:
    """Flat summary shared by the JSON report and the CSV table."""
    if r is None:
        row = {k: None for k in SUMMARY_FIELDS}
        row.update(problem=problem, strategy=strategy, status="error", error=error)
        return row
    return {
        "problem": r.problem,
        "strategy": r.strategy.value,
        "status": r.status,
        "L": encode_number(r.L),
        "U": encode_number(r.U),
        "certified_U": encode_number(r.certified_U),
        "unsafe": r.unsafe,
        "nodes": r.nodes,
        "proof_attempts": r.proof_attempts,
        "proof_successes": r.proof_successes,
        "lp_solves": r.lp_solves,
        "time_to_first_proven": encode_number(r.time_to_first_proven),
        "wall_time": encode_number(r.wall_time),
        "seed": r.seed,
        "eps": encode_number(r.eps),
        "error": error,
    }


def _certificate(c: Certificate) -> dict:
    d = c.to_dict()
    d["box"] = _box(c.box)
    return d


def report_to_dict(r: SolveReport, include_log: bool = True) -> dict:
    out = {"schema": SCHEMA_VERSION, **summary_row(r)}
    del out["error"]
    out["volume"] = {
        "initial": encode_number(r.initial_volume),
        "open": encode_number(r.open_volume),
        "discarded": encode_number(r.discarded_volume),
    }
    out["irreducible"] = r.irreducible
    out["proven"] = [
        {
            "box": _box(pb.box),
            "objective_range": _interval(pb.objective_range),
            "witness_seed": [encode_number(v) for v in pb.witness_seed],
            "certificate": _certificate(pb.certificate),
        }
        for pb in r.proven
    ]
    if include_log:
        out["log"] = [
            {
                "iteration": rec.iteration,
                "L": encode_number(rec.L),
                "U": encode_number(rec.U),
                "node_lb": encode_number(rec.node_lb),
                "width": encode_number(rec.width),
                "open_nodes": rec.open_nodes,
                "events": list(rec.events),
            }
            for rec in r.log
        ]
    return out


def report_to_json(r: SolveReport, include_log: bool = True, indent: int | None = 2) -> str:
    return json.dumps(report_to_dict(r, include_log), indent=indent, allow_nan=False)


def certificates_from_report(d: dict) -> list[Certificate]:
    """Rebuild the certificates stored in a report dictionary."""
    out = []
    for item in d.get("proven", []):
        c = dict(item["certificate"])
        c["box"] = [[decode_number(lo), decode_number(hi)] for lo, hi in c["box"]]
        out.append(Certificate.from_dict(c))
    return out


def table_to_dict(rows: Sequence[dict]) -> dict:
    return {"schema": SCHEMA_VERSION, "columns": list(SUMMARY_FIELDS), "rows": [dict(r) for r in rows]}


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_FIELDS)
    for row in rows:
        w.writerow([_csv_cell(row.get(k)) for k in SUMMARY_FIELDS])
    return buf.getvalue()


_INT_FIELDS = {"nodes", "proof_attempts", "proof_successes", "lp_solves", "seed"}
_NUM_FIELDS = {"L", "U", "certified_U", "time_to_first_proven", "wall_time", "eps"}


def rows_from_csv(text: str) -> list[dict]:
    """Parse a table written by :func:`rows_to_csv` back into JSON-style rows."""
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        row = {}
        for k in SUMMARY_FIELDS:
            v = raw.get(k, "")
            if v == "" and k != "error":
                row[k] = None
            elif k in _INT_FIELDS:
                row[k] = int(v)
            elif k in _NUM_FIELDS:
                row[k] = encode_number(float(v))
            elif k == "unsafe":
                row[k] = v == "true"
            else:
                row[k] = v
        rows.append(row)
    return rows


_NUMBER = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]}
_OPT_NUMBER = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}, {"type": "null"}]}
_INTERVAL = {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2}
_BOX = {"type": "array", "items": _INTERVAL}
_STATUS = {"enum": ["optimal-within-eps", "infeasible-proven", "budget-exhausted"]}
_STRATEGY = {"enum": ["S1", "S2", "S3", "S4", "S5"]}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "solve report",
    "type": "object",
    "required": [
        "schema", "problem", "strategy", "status", "L", "U", "certified_U", "unsafe",
        "nodes", "proof_attempts", "proof_successes", "wall_time", "eps", "proven",
    ],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "problem": {"type": "string"},
        "strategy": _STRATEGY,
        "status": _STATUS,
        "L": _NUMBER,
        "U": _NUMBER,
        "certified_U": _NUMBER,
        "unsafe": {"type": "boolean"},
        "nodes": {"type": "integer", "minimum": 0},
        "proof_attempts": {"type": "integer", "minimum": 0},
        "proof_successes": {"type": "integer", "minimum": 0},
        "lp_solves": {"type": "integer", "minimum": 0},
        "time_to_first_proven": _OPT_NUMBER,
        "wall_time": _NUMBER,
        "seed": {"type": "integer"},
        "eps": _NUMBER,
        "irreducible": {"type": "integer", "minimum": 0},
        "volume": {
            "type": "object",
            "properties": {"initial": _NUMBER, "open": _NUMBER, "discarded": _NUMBER},
        },
        "proven": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["box", "objective_range", "witness_seed", "certificate"],
                "properties": {
                    "box": _BOX,
                    "objective_range": _INTERVAL,
                    "witness_seed": {"type": "array", "items": _NUMBER},
                    "certificate": {
                        "type": "object",
                        "required": ["names", "equations", "unknowns", "box", "center"],
                        "properties": {
                            "names": {"type": "array", "items": {"type": "string"}},
                            "equations": {"type": "array", "items": {"type": "string"}},
                            "unknowns": {"type": "array", "items": {"type": "integer"}},
                            "box": _BOX,
                            "center": {"type": "array", "items": {"type": "number"}},
                            "active_set": {"type": "array", "items": {"type": "integer"}},
                            "rounds": {"type": "integer"},
                        },
                    },
                },
            },
        },
        "log": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["iteration", "L", "U", "events"],
                "properties": {
                    "iteration": {"type": "integer"},
                    "L": _NUMBER,
                    "U": _NUMBER,
                    "node_lb": _NUMBER,
                    "width": _NUMBER,
                    "open_nodes": {"type": "integer"},
                    "events": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
    },
}

TABLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "strategy comparison table",
    "type": "object",
    "required": ["schema", "columns", "rows"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": list(SUMMARY_FIELDS),
                "properties": {
                    "problem": {"type": "string"},
                    "strategy": _STRATEGY,
                    "status": {"oneOf": [_STATUS, {"const": "error"}]},
                    "L": _OPT_NUMBER,
                    "U": _OPT_NUMBER,
                    "certified_U": _OPT_NUMBER,
                    "unsafe": {"type": ["boolean", "null"]},
                    "nodes": {"type": ["integer", "null"]},
                    "proof_attempts": {"type": ["integer", "null"]},
                    "proof_successes": {"type": ["integer", "null"]},
                    "lp_solves": {"type": ["integer", "null"]},
                    "time_to_first_proven": _OPT_NUMBER,
                    "wall_time": _OPT_NUMBER,
                    "seed": {"type": ["integer", "null"]},
                    "eps": _OPT_NUMBER,
                    "error": {"type": ["string", "null"]},
                },
            },
        },
    },
}
