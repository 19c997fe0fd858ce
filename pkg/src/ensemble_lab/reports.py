"""Report serialization: one JSON object, or CSV rows plus a JSON sidecar.

Output bytes depend only on the report contents.  Timing and thread count
go to a separate ``.meta.json`` file so reruns compare byte for byte.
"""
from __future__ import annotations

import csv
import io
import json

__all__ = ["REPORT_SCHEMA", "COLUMNS", "to_json", "to_csv", "write_report", "write_meta"]

COLUMNS = {
    "sample": ["replica", "index", "eigenvalue"],
    "kn": ["log_kn_exact", "log_kn_asymptotic", "gap"],
    "tv": ["replica", "log_kn", "log_ln", "kl_product", "abs_dev"],
    "verify-bulk": ["replica", "ks_distance", "wasserstein1"],
    "verify-extremes": ["replica", "lambda_max_scaled", "lambda_min_scaled"],
    "verify-clt": ["replica", "x1", "x2"],
    "verify-edge-soft": ["replica", "soft_edge_statistic", "airy_lambda1"],
    "verify-edge-hard": ["replica", "hard_edge_statistic", "oracle"],
    "regime": [
        "step", "n", "a1", "a2", "ratio_a1", "ratio_n", "gamma_hat", "gamma_gap",
        "log_kn_exact", "log_kn_asymptotic", "tv_hat", "stderr_tv",
    ],
}

_NUMBER_OR_NULL = {"type": ["number", "null"]}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["library_version", "command", "seed", "config", "summary", "columns", "rows"],
    "additionalProperties": False,
    "properties": {
        "library_version": {"type": "string"},
        "command": {"enum": list(COLUMNS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "config": {
            "type": "object",
            "required": ["command", "ensemble", "beta", "n", "a1", "a2", "reps", "seed"],
        },
        "summary": {"type": "object", "required": ["replicas"]},
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {"type": "array", "items": {"type": "array", "items": _NUMBER_OR_NULL}},
    },
}


def to_json(report):
    return json.dumps(report.to_dict(), indent=2, allow_nan=False) + "\n"


def _cell(v):
    # null marks a non-finite value (e.g. log L_n off the indicator)
    return "" if v is None else repr(v) if isinstance(v, float) else str(v)


def to_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _summary_only(report):
    d = report.to_dict()
    d.pop("rows")
    return json.dumps(d, indent=2, allow_nan=False) + "\n"


def write_report(report, fmt, out_path=None, stdout=None):
    """Write the report; for CSV the non-row fields go to ``<out>.report.json``.

    Returns the list of paths written.
    """
    if fmt == "json":
        text = to_json(report)
        if out_path is None:
            stdout.write(text)
            return []
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        return [out_path]
    text = to_csv(report)
    if out_path is None:
        stdout.write(text)
        return []
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    side = out_path + ".report.json"
    with open(side, "w", encoding="utf-8", newline="") as fh:
        fh.write(_summary_only(report))
    return [out_path, side]


def write_meta(out_path, meta):
    path = out_path + ".meta.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    return path
