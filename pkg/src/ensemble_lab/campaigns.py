"""Campaigns: configured batches of replicas reduced to a report.

Each replica block draws from ``stream.spawn(block, role)`` and rows are
assembled in replica order, so a report depends on the configuration and
seed only, never on the thread count.
"""
from __future__ import annotations

import math
import secrets
from dataclasses import asdict, dataclass, fields, replace

import numpy as np
from scipy import stats

from . import __version__
from .coupling import (
    check_regime,
    estimate_tv,
    log_kn_asymptotic,
    log_kn_exact,
    summarize_rows,
    tv_rows,
)
from .ensembles import (
    EnsembleParams,
    McmcConfig,
    _laguerre_tridiagonals,
    run_jacobi_chains,
    sample_jacobi_matrix,
)
from .errors import ParameterError
from .limit_stats import (
    AiryGrid,
    EmpiricalMeasure,
    hard_edge_oracle_batch,
    ks_distance,
    ks_two_sample,
    sample_airy_spectrum,
    scale_measure,
    soft_edge_statistic,
    hard_edge_statistic,
    wasserstein1,
)
from .mp_law import MPLaw, moment
from .parallel import map_blocks
from .sampling import RngStream
from .tridiag import Spectrum, eigenvalues_batch

__all__ = ["CampaignConfig", "CampaignReport", "COMMANDS", "ENSEMBLES", "run", "make_params"]

COMMANDS = (
    "sample",
    "kn",
    "tv",
    "verify-bulk",
    "verify-extremes",
    "verify-clt",
    "verify-edge-soft",
    "verify-edge-hard",
    "regime",
)
ENSEMBLES = ("laguerre", "jacobi-matrix", "jacobi-mcmc")
FORMATS = ("json", "csv")

# replicas per block for the dense and chain samplers
_SMALL_BLOCK = 50
_MP_REFERENCE_DRAWS = 10_000


@dataclass(frozen=True)
class CampaignConfig:
    command: str
    n: int
    ensemble: str = "laguerre"
    beta: float = 2.0
    a1: float | None = None
    a2: float | None = None
    gamma_target: float | None = None
    reps: int = 1
    seed: int | None = None
    threads: int = 1
    out_path: str | None = None
    format: str = "json"
    # regime sweeps: n doubles ``sweep_steps`` times, a2 = n ** a2_exponent
    sweep_steps: int = 4
    a2_exponent: float = 5.0
    # edge campaigns
    n_large: int = 300
    airy_step: float = 0.01
    airy_cutoff: float = 10.0
    # Metropolis sampler
    burn_in: int = 4000
    thinning: int = 10
    proposal_scale: float = 0.5

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParameterError(f"unknown command {self.command!r}", key="command")
        if self.ensemble not in ENSEMBLES:
            raise ParameterError(f"unknown ensemble {self.ensemble!r}", key="ensemble")
        if self.format not in FORMATS:
            raise ParameterError(f"unknown format {self.format!r}", key="format")
        if int(self.reps) != self.reps or self.reps < 1:
            raise ParameterError("reps must be an integer >= 1", key="reps")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ParameterError("threads must be an integer >= 1", key="threads")
        if self.seed is not None and not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer", key="seed")
        if self.a1 is None and self.gamma_target is None:
            raise ParameterError("give a1 or gamma", key="a1")
        if self.gamma_target is not None and not 0 < self.gamma_target <= 1:
            raise ParameterError("gamma must lie in (0, 1]", key="gamma")
        if self.sweep_steps < 1:
            raise ParameterError("sweep_steps must be >= 1", key="sweep_steps")
        # fails early on invalid ensemble parameters
        if self.command != "regime":
            make_params(self)

    @property
    def a1_value(self):
        if self.a1 is not None:
            return float(self.a1)
        return self.n * self.beta / (2.0 * self.gamma_target)

    def echo(self):
        """Configuration fields that determine the numbers (threads and paths excluded)."""
        out = asdict(self)
        for key in ("threads", "out_path", "format"):
            out.pop(key)
        out["a1"] = self.a1_value
        return out


@dataclass
class CampaignReport:
    command: str
    config: dict
    columns: list
    rows: list
    summary: dict
    library_version: str = __version__

    def to_dict(self):
        return {
            "library_version": self.library_version,
            "command": self.command,
            "seed": self.config["seed"],
            "config": self.config,
            "summary": self.summary,
            "columns": self.columns,
            "rows": self.rows,
        }


def make_params(cfg, n=None, a1=None, a2=None):
    n = cfg.n if n is None else n
    a1 = cfg.a1_value if a1 is None else a1
    a2 = cfg.a2 if a2 is None else a2
    needs_a2 = cfg.ensemble != "laguerre" or cfg.command in ("kn", "tv")
    if needs_a2 and a2 is None:
        raise ParameterError(f"command {cfg.command} with {cfg.ensemble} needs a2", key="a2")
    return EnsembleParams(cfg.beta, n, a1, a2)


# replica generation


def _mcmc_config(cfg):
    return McmcConfig(cfg.proposal_scale, cfg.burn_in, cfg.thinning)


def _spectra(cfg, params, stream, role="spectra"):
    """All replica spectra as an ascending ``(reps, n)`` array."""
    if cfg.ensemble == "laguerre":

        def block(size, sub, start):
            d, e = _laguerre_tridiagonals(params, size, sub)
            return eigenvalues_batch(d, e)

        parts = map_blocks(block, cfg.reps, stream, role, cfg.threads)
    elif cfg.ensemble == "jacobi-matrix":

        def block(size, sub, start):
            return np.stack([sample_jacobi_matrix(params, sub.spawn(j, "rep")).values for j in range(size)])

        parts = map_blocks(block, cfg.reps, stream, role, cfg.threads, block=_SMALL_BLOCK)
    else:
        mc = _mcmc_config(cfg)

        def block(size, sub, start):
            states, _ = run_jacobi_chains(params, mc, size, sub, keep=1)
            return states[:, 0, :]

        parts = map_blocks(block, cfg.reps, stream, role, cfg.threads, block=_SMALL_BLOCK)
    return np.concatenate(parts)


def _laguerre_power_sums(cfg, params, stream, role="power-sums"):
    """``(sum lambda, sum lambda^2)`` per replica from the tridiagonal entries.

    The trace and the squared Frobenius norm give the first two power sums
    of the spectrum without diagonalizing.
    """

    def block(size, sub, start):
        d, e = _laguerre_tridiagonals(params, size, sub)
        return np.column_stack([d.sum(1), (d * d).sum(1) + 2.0 * (e * e).sum(1)])

    return np.concatenate(map_blocks(block, cfg.reps, stream, role, cfg.threads))


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else float("nan")
    return float(x.mean()), se


def _clean(value):
    # JSON has no NaN or infinities; the report marks them as null
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


# commands


def _cmd_sample(cfg, stream):
    params = make_params(cfg)
    spectra = _spectra(cfg, params, stream)
    rows = [[r, j, float(v)] for r, row in enumerate(spectra) for j, v in enumerate(row)]
    trace_mean, trace_se = _mean_se(spectra.sum(1))
    summary = {
        "trace_mean": trace_mean,
        "trace_stderr": trace_se,
        "lambda_max_mean": float(spectra[:, -1].mean()),
        "lambda_min_mean": float(spectra[:, 0].mean()),
    }
    return ["replica", "index", "eigenvalue"], rows, summary


def _cmd_kn(cfg, stream):
    params = make_params(cfg)
    g = cfg.gamma_target if cfg.gamma_target is not None else params.gamma_hat
    exact = log_kn_exact(params)
    asym = log_kn_asymptotic(params.beta, params.n, g, params.a2)
    summary = {"log_kn_exact": exact, "log_kn_asymptotic": asym, "gap": abs(exact - asym)}
    return ["log_kn_exact", "log_kn_asymptotic", "gap"], [[exact, asym, abs(exact - asym)]], summary


def _cmd_tv(cfg, stream):
    params = make_params(cfg)
    if cfg.reps < 100:
        raise ParameterError("tv needs reps >= 100", key="reps")
    rows_ = tv_rows(params, cfg.reps, stream, cfg.threads)
    est = summarize_rows(rows_)
    rows = [
        [r, rows_.log_kn, float(lln), float(kl), float(dev)]
        for r, (lln, kl, dev) in enumerate(zip(rows_.log_ln, rows_.kl_product, rows_.abs_dev))
    ]
    summary = asdict(est)
    summary["outside_support"] = int(np.isneginf(rows_.log_ln).sum())
    return ["replica", "log_kn", "log_ln", "kl_product", "abs_dev"], rows, summary


def _bulk_reference(cfg, law, size, stream):
    # W1 needs equal counts: average over chunks of ``size`` law draws
    chunks = max(1, math.ceil(_MP_REFERENCE_DRAWS / size))
    return [EmpiricalMeasure(law.sample(size, stream.spawn(k, "mp-reference"))) for k in range(chunks)]


def _cmd_bulk(cfg, stream):
    params = make_params(cfg)
    spectra = _spectra(cfg, params, stream)
    g = params.gamma_hat
    if g > 1:
        raise ParameterError(f"bulk law needs gamma <= 1, got {g}", key="a1")
    if cfg.ensemble == "laguerre":
        factor, law = g / (params.n * params.beta), MPLaw(g)
    else:
        factor, law = params.a2 / params.n, MPLaw(g, scale_c=params.c)
    refs = _bulk_reference(cfg, law, params.n, stream)
    rows = []
    for r, values in enumerate(spectra):
        emp = scale_measure(values, factor)
        w1 = float(np.mean([wasserstein1(emp, ref) for ref in refs]))
        rows.append([r, ks_distance(emp, law), w1])
    ks = np.array([row[1] for row in rows])
    w1 = np.array([row[2] for row in rows])
    summary = {
        "gamma": g,
        "scale": factor,
        "ks_distance": float(ks.mean()),
        "ks_distance_max": float(ks.max()),
        "wasserstein1": float(w1.mean()),
        "reference_draws": len(refs) * params.n,
    }
    return ["replica", "ks_distance", "wasserstein1"], rows, summary


def _extreme_targets(params, laguerre):
    g = params.gamma_hat
    b = params.beta
    if laguerre:
        root = math.sqrt(1.0 / g)
        return b * (1.0 + root) ** 2, b * (1.0 - root) ** 2
    root = math.sqrt(g)
    return b * (1.0 + root) ** 2 / (2.0 * g), b * (1.0 - root) ** 2 / (2.0 * g)


def _relative_error(value, target):
    if target == 0:
        return float("inf") if value != 0 else 0.0
    return abs(value - target) / abs(target)


def _cmd_extremes(cfg, stream):
    params = make_params(cfg)
    laguerre = cfg.ensemble == "laguerre"
    spectra = _spectra(cfg, params, stream)
    factor = 1.0 / params.n if laguerre else params.a2 / params.n
    top, bottom = factor * spectra[:, -1], factor * spectra[:, 0]
    t_max, t_min = _extreme_targets(params, laguerre)
    rows = [[r, float(a), float(b)] for r, (a, b) in enumerate(zip(top, bottom))]
    m_max, se_max = _mean_se(top)
    m_min, se_min = _mean_se(bottom)
    summary = {
        "scale": factor,
        "lambda_max_scaled_mean": m_max,
        "lambda_max_scaled_stderr": se_max,
        "lambda_max_target": t_max,
        "lambda_max_rel_error": _relative_error(m_max, t_max),
        "lambda_min_scaled_mean": m_min,
        "lambda_min_scaled_stderr": se_min,
        "lambda_min_target": t_min,
        "lambda_min_rel_error": _relative_error(m_min, t_min),
    }
    return ["replica", "lambda_max_scaled", "lambda_min_scaled"], rows, summary


def _shape(x):
    m, se = _mean_se(x)
    return {
        "mean": m,
        "stderr": se,
        "variance": float(np.var(x, ddof=1)) if x.size > 1 else float("nan"),
        "skewness": float(stats.skew(x)),
        "excess_kurtosis": float(stats.kurtosis(x)),
    }


def _cmd_clt(cfg, stream):
    params = make_params(cfg)
    g, n = params.gamma_hat, params.n
    if cfg.ensemble == "laguerre":
        s = g / (n * params.beta)
        sums = _laguerre_power_sums(cfg, params, stream)
        p1, p2 = sums[:, 0], sums[:, 1]
    else:
        s = params.c * params.a2 / n
        spectra = _spectra(cfg, params, stream)
        p1, p2 = spectra.sum(1), (spectra * spectra).sum(1)
    x1 = s * p1 - n * moment(g, 1)
    x2 = s * s * p2 - n * moment(g, 2)
    rows = [[r, float(a), float(b)] for r, (a, b) in enumerate(zip(x1, x2))]
    summary = {"gamma": g, "x1": _shape(x1), "x2": _shape(x2)}
    return ["replica", "x1", "x2"], rows, summary


def _require_jacobi_ensemble(cfg):
    if cfg.ensemble == "laguerre":
        raise ParameterError(f"{cfg.command} needs a Jacobi ensemble", key="ensemble")


def _cmd_edge_soft(cfg, stream):
    _require_jacobi_ensemble(cfg)
    params = make_params(cfg)
    spectra = _spectra(cfg, params, stream)
    soft = np.array([soft_edge_statistic(Spectrum(v), params, 1) for v in spectra])
    grid = AiryGrid(cfg.airy_step, cfg.airy_cutoff)

    def block(size, sub, start):
        return np.array(
            [sample_airy_spectrum(params.beta, 1, grid, sub.spawn(j, "rep"))[0] for j in range(size)]
        )

    airy = np.concatenate(map_blocks(block, cfg.reps, stream, "airy", cfg.threads, block=_SMALL_BLOCK))
    rows = [[r, float(a), float(b)] for r, (a, b) in enumerate(zip(soft, airy))]
    summary = {
        "ks_two_sample": ks_two_sample(EmpiricalMeasure(soft), EmpiricalMeasure(airy)),
        "soft_edge_mean": float(soft.mean()),
        "airy_mean": float(airy.mean()),
        "soft_edge_std": float(soft.std(ddof=1)) if soft.size > 1 else None,
        "airy_std": float(airy.std(ddof=1)) if airy.size > 1 else None,
    }
    return ["replica", "soft_edge_statistic", "airy_lambda1"], rows, summary


def _cmd_edge_hard(cfg, stream):
    _require_jacobi_ensemble(cfg)
    params = make_params(cfg)
    c = 2.0 * params.a1 / params.beta - params.n
    spectra = _spectra(cfg, params, stream)
    hard = np.array([hard_edge_statistic(Spectrum(v), params, 1) for v in spectra])

    def block(size, sub, start):
        return hard_edge_oracle_batch(params.beta, c, 1, cfg.n_large, size, sub)[:, 0]

    oracle = np.concatenate(map_blocks(block, cfg.reps, stream, "hard-oracle", cfg.threads))
    rows = [[r, float(a), float(b)] for r, (a, b) in enumerate(zip(hard, oracle))]
    summary = {
        "c": c,
        "ks_two_sample": ks_two_sample(EmpiricalMeasure(hard), EmpiricalMeasure(oracle)),
        "hard_edge_mean": float(hard.mean()),
        "oracle_mean": float(oracle.mean()),
    }
    return ["replica", "hard_edge_statistic", "oracle"], rows, summary


def _cmd_regime(cfg, stream):
    g = cfg.gamma_target if cfg.gamma_target is not None else cfg.n * cfg.beta / (2.0 * cfg.a1_value)
    seq = []
    for k in range(cfg.sweep_steps):
        n = cfg.n * 2**k
        a1 = math.ceil(n * cfg.beta / (2.0 * g))
        seq.append(EnsembleParams(cfg.beta, n, a1, float(n) ** cfg.a2_exponent))
    reports = check_regime(seq, g)
    rows = []
    tv_vals = []
    for k, (p, rep) in enumerate(zip(seq, reports)):
        exact = log_kn_exact(p)
        asym = log_kn_asymptotic(p.beta, p.n, g, p.a2)
        row = [k, p.n, p.a1, p.a2, rep.ratio_a1, rep.ratio_n, rep.gamma_hat, rep.gamma_gap, exact, asym]
        if cfg.reps >= 100:
            est = estimate_tv(p, cfg.reps, stream.spawn(k, "regime"), cfg.threads)
            row += [est.tv_hat, est.stderr_tv]
            tv_vals.append(est.tv_hat)
        else:
            row += [None, None]
        rows.append(row)

    def decreasing(col):
        vals = [r[col] for r in rows]
        return all(b < a for a, b in zip(vals, vals[1:]))

    gaps = [abs(r[8] - r[9]) for r in rows]
    summary = {
        "gamma_target": g,
        "ratio_a1_decreasing": decreasing(4),
        "ratio_n_decreasing": decreasing(5),
        "kn_gap_nonincreasing": all(b <= a for a, b in zip(gaps, gaps[1:])),
        "kn_gap_final": gaps[-1],
    }
    if tv_vals:
        summary["tv_decreasing"] = all(b < a for a, b in zip(tv_vals, tv_vals[1:]))
    columns = [
        "step", "n", "a1", "a2", "ratio_a1", "ratio_n", "gamma_hat", "gamma_gap",
        "log_kn_exact", "log_kn_asymptotic", "tv_hat", "stderr_tv",
    ]
    return columns, rows, summary


_DISPATCH = {
    "sample": _cmd_sample,
    "kn": _cmd_kn,
    "tv": _cmd_tv,
    "verify-bulk": _cmd_bulk,
    "verify-extremes": _cmd_extremes,
    "verify-clt": _cmd_clt,
    "verify-edge-soft": _cmd_edge_soft,
    "verify-edge-hard": _cmd_edge_hard,
    "regime": _cmd_regime,
}


def run(cfg):
    """Execute a campaign and return its report (nothing is written here)."""
    if cfg.seed is None:
        cfg = replace(cfg, seed=secrets.randbits(64))
    stream = RngStream(cfg.seed, ((0, cfg.command),))
    columns, rows, summary = _DISPATCH[cfg.command](cfg, stream)
    summary = dict(summary)
    summary["replicas"] = cfg.reps
    return CampaignReport(cfg.command, _clean(cfg.echo()), columns, _clean(rows), _clean(summary))


def config_keys():
    return [f.name for f in fields(CampaignConfig)]
