"""Command-line entry point.

Exit status: 0 success, 2 invalid parameters or usage, 3 numerical range,
4 I/O.  Failures print one JSON error record on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .campaigns import COMMANDS, ENSEMBLES, CampaignConfig, config_keys, run
from .errors import InputError, NumericalRangeError, ParameterError
from .parallel import default_threads
from .reports import write_meta, write_report

__all__ = ["main", "parse_config", "build_parser"]

EXIT_OK = 0
EXIT_PARAMS = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

# flag name -> CampaignConfig field
_FLAG_FIELDS = {
    "command": "command",
    "ensemble": "ensemble",
    "beta": "beta",
    "n": "n",
    "a1": "a1",
    "a2": "a2",
    "gamma": "gamma_target",
    "reps": "reps",
    "seed": "seed",
    "threads": "threads",
    "out": "out_path",
    "format": "format",
}
# extra keys accepted in the config file only
_FILE_ONLY = (
    "sweep_steps", "a2_exponent", "n_large", "airy_step", "airy_cutoff",
    "burn_in", "thinning", "proposal_scale",
)
_INT_FIELDS = {"n", "reps", "seed", "threads", "sweep_steps", "n_large", "burn_in", "thinning"}


class UsageError(ParameterError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, key="argv")


def build_parser():
    p = _Parser(prog="ensemble-lab", description="Beta-ensemble sampling and limit-law campaigns.")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--ensemble", choices=ENSEMBLES)
    p.add_argument("--beta", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--a1", type=float)
    p.add_argument("--a2", type=float)
    p.add_argument("--gamma", type=float, help="target ratio; sets a1 = n*beta/(2*gamma) when a1 is absent")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="default from ENSEMBLE_LAB_THREADS, else 1")
    p.add_argument("--out", help="output path; stdout when absent")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--config", help="flat JSON object with the same keys as the flags")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _load_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config file is not valid JSON: {exc}", key="config") from exc
    if not isinstance(data, dict):
        raise ParameterError("config file must hold a JSON object", key="config")
    allowed = set(_FLAG_FIELDS) | set(_FILE_ONLY)
    values = {}
    for key, val in data.items():
        if key not in allowed:
            raise ParameterError(f"unknown config key {key!r}", key=key)
        values[_FLAG_FIELDS.get(key, key)] = val
    return values


def _coerce(values):
    out = {}
    for field, val in values.items():
        if val is None:
            continue
        if field in _INT_FIELDS:
            if isinstance(val, bool) or (isinstance(val, float) and not val.is_integer()):
                raise ParameterError(f"{field} must be an integer", key=field)
            try:
                val = int(val)
            except (TypeError, ValueError):
                raise ParameterError(f"{field} must be an integer", key=field) from None
        out[field] = val
    return out


def parse_config(argv):
    """Build a CampaignConfig from flags layered over an optional JSON file."""
    args = build_parser().parse_args(argv)
    values = _load_file(args.config) if args.config else {}
    for flag, field in _FLAG_FIELDS.items():
        v = getattr(args, flag)
        if v is not None:
            values[field] = v
    values = _coerce(values)
    if "command" not in values:
        raise UsageError("--command is required", key="command")
    if "n" not in values:
        raise UsageError("--n is required", key="n")
    values.setdefault("threads", default_threads())
    assert set(values) <= set(config_keys())
    try:
        return CampaignConfig(**values)
    except TypeError as exc:
        raise ParameterError(str(exc), key="config") from exc


def _error_record(exc, code):
    record = {
        "error": type(exc).__name__,
        "message": str(exc),
        "exit_code": code,
    }
    key = getattr(exc, "key", None)
    if key is not None:
        record["key"] = key
    return json.dumps(record)


def main(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        t0 = time.perf_counter()
        report = run(cfg)
        elapsed = time.perf_counter() - t0
        written = write_report(report, cfg.format, cfg.out_path, stdout)
        meta = {"wall_clock_s": elapsed, "threads": cfg.threads, "seed": report.config["seed"]}
        if cfg.out_path is not None:
            written.append(write_meta(cfg.out_path, meta))
        else:
            stderr.write(json.dumps(meta) + "\n")
        return EXIT_OK
    except (ParameterError, InputError) as exc:
        stderr.write(_error_record(exc, EXIT_PARAMS) + "\n")
        return EXIT_PARAMS
    except (NumericalRangeError, FloatingPointError, OverflowError) as exc:
        stderr.write(_error_record(exc, EXIT_NUMERICAL) + "\n")
        return EXIT_NUMERICAL
    except OSError as exc:
        stderr.write(_error_record(exc, EXIT_IO) + "\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
