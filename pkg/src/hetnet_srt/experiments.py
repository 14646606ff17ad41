"""Figure-reproduction sweeps producing tabular :class:`SweepResult` objects."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

from . import __version__, analytic, asymptotics
from .model import ALL_SCHEMES, RatePair, Scheme, SystemConfig, db_to_linear
from .montecarlo import DEFAULT_TRIALS, estimate_curve, estimate_point
from .special_math import ConvergenceError

# Beyond this value of 2**R * sigma2_sm the IC-USS closed forms are only indicative.
IC_USS_VALIDITY_LIMIT = 0.1
IOP_GRID_STEP = 0.02
IOP_RATE_MAX = 12.0
SRT_RATE_MAX = 5.0
SRT_GRID_POINTS = 200


@dataclass
class SweepResult:
    experiment_id: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def column(self, name: str, **where) -> list:
        return [row[name] for row in self.rows
                if all(row.get(k) == v for k, v in where.items())]

    def write_csv(self, stream: TextIO) -> None:
        for key in sorted(self.metadata):
            stream.write(f"# {key}={_meta_text(self.metadata[key])}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(row.get(c)) for c in self.columns])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def write_jsonl(self, stream: TextIO) -> None:
        stream.write(json.dumps({"experiment": self.experiment_id, "metadata": self.metadata},
                                sort_keys=True, default=str) + "\n")
        for row in self.rows:
            clean = {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in row.items()}
            stream.write(json.dumps(clean, sort_keys=True) + "\n")


def _meta_text(value) -> str:
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    if isinstance(value, (list, tuple)):
        return json.dumps(list(value))
    return str(value)


def format_value(value) -> str:
    """CSV cell text; probabilities below 1e-3 come out in scientific notation."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if v != 0.0 and abs(v) < 1e-3:
            return f"{v:.6e}"
        return f"{v:.10g}"
    return str(value)


def _base_metadata(experiment_id: str, config: SystemConfig, trials: int, seed: int, **extra) -> dict:
    meta = {
        "experiment": experiment_id,
        "version": __version__,
        "seed": seed,
        "trials": trials,
        "config": config.to_dict(),
    }
    meta.update(extra)
    return meta


def default_rate_grid(rs: float, rate_max: float = SRT_RATE_MAX, points: int = SRT_GRID_POINTS) -> list[float]:
    if rs > 0:
        return [float(x) for x in np.geomspace(rs, rate_max, points)]
    return [float(x) for x in np.linspace(rs, rate_max, points)]


def _safe_point(scheme: Scheme, config: SystemConfig, rates: RatePair):
    """Analytic point, or ``(None, reason)`` when the closed form does not apply."""
    try:
        return analytic.point(scheme, config, rates), ""
    except analytic.DegenerateRegimeError as exc:
        return None, f"closed form undefined: {exc}"
    except ConvergenceError as exc:
        return None, f"quadrature did not converge: {exc}"


def _validity_warning(scheme: Scheme, config: SystemConfig, rates: RatePair) -> str:
    if scheme is not Scheme.IC_USS:
        return ""
    v = analytic.ic_uss_validity(config, rates)
    if v > IC_USS_VALIDITY_LIMIT:
        return f"asymptotic closed form outside validity (2^R*sigma2_sm={v:.3g})"
    return ""


# ---------------------------------------------------------------------------
# SRT curves (overall outage versus overall intercept)
# ---------------------------------------------------------------------------

SRT_COLUMNS = [
    "scheme", "gamma_m_db", "rs", "ro",
    "analytic_p_int", "analytic_p_out", "mc_p_int", "mc_p_int_se", "mc_p_out", "mc_p_out_se",
    "analytic_p_out_m", "analytic_p_out_s", "analytic_p_int_m", "analytic_p_int_s",
    "mc_p_out_m", "mc_p_out_s", "mc_p_int_m", "mc_p_int_s",
    "exact", "primary", "warning",
]


def _srt_rows(config: SystemConfig, rs: float, scheme: Scheme, rate_grid: Sequence[float],
              trials: int, seed: int, workers: int) -> list[dict]:
    grid = sorted(float(r) for r in rate_grid)
    rates = [RatePair.symmetric(r, rs) for r in grid]
    mc = estimate_curve(config, rates, scheme, trials, seed, workers=workers) if trials > 0 else [None] * len(rates)
    rows = []
    for r, rp, est in zip(grid, rates, mc):
        pt, why = _safe_point(scheme, config, rp)
        warning = why or _validity_warning(scheme, config, rp)
        nan = math.nan
        row = {
            "scheme": scheme.value, "gamma_m_db": config.gamma_m_db, "rs": rs, "ro": r,
            "analytic_p_int": pt.p_int_overall if pt else nan,
            "analytic_p_out": pt.p_out_overall if pt else nan,
            "analytic_p_out_m": pt.p_out_m if pt else nan,
            "analytic_p_out_s": pt.p_out_s if pt else nan,
            "analytic_p_int_m": pt.p_int_m if pt else nan,
            "analytic_p_int_s": pt.p_int_s if pt else nan,
            "exact": bool(pt and pt.is_exact),
            "primary": "montecarlo" if (warning and est is not None) else "analytic",
            "warning": warning,
        }
        if est is not None:
            row.update({
                "mc_p_int": est.p_int_overall, "mc_p_int_se": est.p_int_overall_se,
                "mc_p_out": est.p_out_overall, "mc_p_out_se": est.p_out_overall_se,
                "mc_p_out_m": est.p_out_m.value, "mc_p_out_s": est.p_out_s.value,
                "mc_p_int_m": est.p_int_m.value, "mc_p_int_s": est.p_int_s.value,
            })
        rows.append(row)
    return rows


def srt_curve(config: SystemConfig, rs: float, scheme: "Scheme | str",
              rate_grid: Sequence[float] | None = None, trials: int = DEFAULT_TRIALS,
              seed: int = 0, *, workers: int = 1) -> SweepResult:
    """Trace (overall intercept, overall outage) as R_M^o = R_S^o sweeps the grid."""
    scheme = Scheme.parse(scheme)
    grid = default_rate_grid(rs) if rate_grid is None else list(rate_grid)
    rows = _srt_rows(config, rs, scheme, grid, trials, seed, workers)
    meta = _base_metadata("srt-curve", config, trials, seed, scheme=scheme.value, rs=rs)
    return SweepResult("srt-curve", list(SRT_COLUMNS), rows, meta)


def srt_figure(config: SystemConfig, rs_values: Sequence[float], snrs_db: Sequence[float] | None = None,
               schemes: Sequence[Scheme] = ALL_SCHEMES, trials: int = DEFAULT_TRIALS, seed: int = 0,
               *, workers: int = 1, points: int = SRT_GRID_POINTS) -> SweepResult:
    """All SRT curves of one figure (several secrecy rates and/or SNRs) in one table."""
    snrs = [config.gamma_m_db] if not snrs_db else list(snrs_db)
    rows = []
    for db in snrs:
        cfg = config.with_snr_db(db)
        for rs in rs_values:
            for scheme in schemes:
                rows.extend(_srt_rows(cfg, rs, Scheme.parse(scheme), default_rate_grid(rs, points=points),
                                      trials, seed, workers))
    meta = _base_metadata("srt-curve", config, trials, seed, rs_values=list(rs_values),
                          snrs_db=snrs, schemes=[Scheme.parse(s).value for s in schemes])
    return SweepResult("srt-curve", list(SRT_COLUMNS), rows, meta)


def outage_at_intercept(intercepts: Sequence[float], outages: Sequence[float], level: float) -> float:
    """Interpolate an SRT curve (log-log) at a given overall intercept level.

    Returns NaN when ``level`` lies outside the range traced by the curve.
    """
    pairs = [(i, o) for i, o in zip(intercepts, outages)
             if i > 0 and o > 0 and math.isfinite(i) and math.isfinite(o)]
    if len(pairs) < 2:
        return math.nan
    pairs.sort()
    x = np.log([p[0] for p in pairs])
    y = np.log([p[1] for p in pairs])
    target = math.log(level)
    if target < x[0] or target > x[-1]:
        return math.nan
    return float(np.exp(np.interp(target, x, y)))


# ---------------------------------------------------------------------------
# IOP minimization
# ---------------------------------------------------------------------------

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-7) -> float:
    """Minimizer of a unimodal ``f`` on [lo, hi]."""
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
    return c if fc <= fd else d


def _analytic_iop(scheme: Scheme, config: SystemConfig, rs: float) -> Callable[[float], float]:
    def f(r: float) -> float:
        pt, _ = _safe_point(scheme, config, RatePair.symmetric(r, rs))
        return pt.iop if pt else math.inf
    return f


@dataclass(frozen=True)
class IopOptimum:
    rate: float
    iop: float
    grid_neighbors: tuple[float, float]
    local_minimum: bool


def minimize_iop(scheme: "Scheme | str", config: SystemConfig, rs: float,
                 rate_max: float = IOP_RATE_MAX, step: float = IOP_GRID_STEP) -> IopOptimum:
    """Coarse grid over [rs, rate_max] then golden-section refinement around the best cell."""
    scheme = Scheme.parse(scheme)
    f = _analytic_iop(scheme, config, rs)
    n = int(math.floor((rate_max - rs) / step + 1e-9))
    grid = [rs + k * step for k in range(n + 1)]
    values = [f(r) for r in grid]
    best = int(np.argmin(values))
    if not math.isfinite(values[best]):
        raise analytic.DegenerateRegimeError(f"IOP undefined on the whole rate grid for {scheme.value}")
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, n)]
    rate = golden_section(f, lo, hi) if hi > lo else grid[best]
    iop = f(rate)
    if iop > values[best]:
        rate, iop = grid[best], values[best]
    left = values[max(best - 1, 0)]
    right = values[min(best + 1, n)]
    return IopOptimum(rate, iop, (left, right), iop <= left and iop <= right)


IOP_COLUMNS = [
    "scheme", "gamma_m_db", "rs", "ro_opt", "analytic_iop", "analytic_p_int", "analytic_p_out",
    "mc_iop", "mc_iop_se", "local_minimum", "exact", "warning",
]


def iop_vs_snr(config: SystemConfig, rs: float, scheme: "Scheme | str", snr_grid_db: Sequence[float],
               rate_max: float = IOP_RATE_MAX, step: float = IOP_GRID_STEP,
               trials: int = DEFAULT_TRIALS, seed: int = 0, *, workers: int = 1) -> SweepResult:
    """Minimum of overall intercept + overall outage over the common rate, per SNR.

    The minimization uses the closed forms; the Monte Carlo column evaluates
    the same rate independently.
    """
    scheme = Scheme.parse(scheme)
    rows = []
    certificates = []
    for db in sorted(snr_grid_db):
        cfg = config.with_snr_db(db)
        opt = minimize_iop(scheme, cfg, rs, rate_max, step)
        rates = RatePair.symmetric(opt.rate, rs)
        pt = analytic.point(scheme, cfg, rates)
        row = {
            "scheme": scheme.value, "gamma_m_db": db, "rs": rs, "ro_opt": opt.rate,
            "analytic_iop": opt.iop, "analytic_p_int": pt.p_int_overall,
            "analytic_p_out": pt.p_out_overall, "local_minimum": opt.local_minimum,
            "exact": pt.is_exact, "warning": _validity_warning(scheme, cfg, rates),
        }
        if trials > 0:
            est = estimate_point(cfg, rates, scheme, trials, seed, workers=workers)
            row["mc_iop"] = est.iop
            row["mc_iop_se"] = math.hypot(est.p_int_overall_se, est.p_out_overall_se)
        rows.append(row)
        certificates.append(opt.local_minimum)
    meta = _base_metadata("iop-vs-snr", config, trials, seed, scheme=scheme.value, rs=rs,
                          rate_search=[rs, rate_max, step],
                          local_minimum_certified=all(certificates))
    return SweepResult("iop-vs-snr", list(IOP_COLUMNS), rows, meta)


# ---------------------------------------------------------------------------
# Outage under an intercept constraint
# ---------------------------------------------------------------------------

OUTAGE_COLUMNS = [
    "scheme", "gamma_m_db", "p_int_constraint", "ro_m", "ro_s", "analytic_p_out",
    "mc_p_out", "mc_p_out_se", "mc_p_int_m", "mc_p_int_s", "exact", "warning",
]


def outage_vs_snr(config: SystemConfig, rs: float, scheme: "Scheme | str", snr_grid_db: Sequence[float],
                  p_int_constraint: float, trials: int = DEFAULT_TRIALS, seed: int = 0,
                  *, workers: int = 1) -> SweepResult:
    """Overall outage when each link's rate is solved to meet the intercept constraint."""
    scheme = Scheme.parse(scheme)
    rows = []
    for db in sorted(snr_grid_db):
        cfg = config.with_snr_db(db)
        rates = asymptotics.rates_for_intercept(cfg, scheme, rs, p_int_constraint)
        pt, why = _safe_point(scheme, cfg, rates)
        row = {
            "scheme": scheme.value, "gamma_m_db": db, "p_int_constraint": p_int_constraint,
            "ro_m": rates.ro_m, "ro_s": rates.ro_s,
            "analytic_p_out": pt.p_out_overall if pt else math.nan,
            "exact": bool(pt and pt.is_exact),
            "warning": why or _validity_warning(scheme, cfg, rates),
        }
        if trials > 0:
            est = estimate_point(cfg, rates, scheme, trials, seed, workers=workers)
            row.update({"mc_p_out": est.p_out_overall, "mc_p_out_se": est.p_out_overall_se,
                        "mc_p_int_m": est.p_int_m.value, "mc_p_int_s": est.p_int_s.value})
        rows.append(row)
    meta = _base_metadata("outage-vs-snr", config, trials, seed, scheme=scheme.value, rs=rs,
                          p_int_constraint=p_int_constraint)
    return SweepResult("outage-vs-snr", list(OUTAGE_COLUMNS), rows, meta)


# ---------------------------------------------------------------------------
# Exact versus asymptotic constrained outage
# ---------------------------------------------------------------------------

EVA_COLUMNS = [
    "scheme", "gamma_m_db", "p_int_constraint", "ro_m", "ro_s", "exact_p_out",
    "asymptotic_p_out", "relative_gap", "mc_p_out", "mc_p_out_se",
]


def exact_vs_asymptotic(config: SystemConfig, rs: float, snr_grid_db: Sequence[float],
                        p_int_constraint: float, schemes: Sequence[Scheme] = ALL_SCHEMES,
                        trials: int = 0, seed: int = 0, *, workers: int = 1) -> SweepResult:
    """Constrained overall outage at finite SNR next to its high-SNR limit.

    The finite-SNR value solves each link's rate from the closed-form intercept
    probability at that SNR; the limit uses the SNR-free rate inversions.
    """
    rows = []
    for scheme in schemes:
        scheme = Scheme.parse(scheme)
        for db in sorted(snr_grid_db):
            cfg = config.with_snr_db(db)
            rates = asymptotics.rates_for_intercept(cfg, scheme, rs, p_int_constraint)
            exact = analytic.point(scheme, cfg, rates).p_out_overall
            a_m, a_s = asymptotics.asymptotic_outage(cfg, scheme, rs, p_int_constraint)
            asym = a_m * a_s
            row = {
                "scheme": scheme.value, "gamma_m_db": db, "p_int_constraint": p_int_constraint,
                "ro_m": rates.ro_m, "ro_s": rates.ro_s, "exact_p_out": exact,
                "asymptotic_p_out": asym, "relative_gap": abs(asym - exact) / exact,
            }
            if trials > 0:
                est = estimate_point(cfg, rates, scheme, trials, seed, workers=workers)
                row.update({"mc_p_out": est.p_out_overall, "mc_p_out_se": est.p_out_overall_se})
            rows.append(row)
    meta = _base_metadata("exact-vs-asymptotic", config, trials, seed, rs=rs,
                          p_int_constraint=p_int_constraint)
    return SweepResult("exact-vs-asymptotic", list(EVA_COLUMNS), rows, meta)


# ---------------------------------------------------------------------------
# Secrecy diversity
# ---------------------------------------------------------------------------

DIVERSITY_COLUMNS = ["scheme", "gamma_m_db", "ro_m", "ro_s", "p_out_overall", "source",
                     "fitted_order", "claimed_order"]


def diversity_table(config: SystemConfig, rs: float, snr_grid_db: Sequence[float], p_int_constraint: float,
                    schemes: Sequence[Scheme] = ALL_SCHEMES, trials: int = DEFAULT_TRIALS,
                    seed: int = 0) -> tuple[SweepResult, dict[str, asymptotics.DiversityReport]]:
    rows = []
    reports = {}
    for scheme in schemes:
        rep = asymptotics.diversity_report(config, scheme, p_int_constraint, snr_grid_db, rs,
                                           trials=trials, seed=seed)
        reports[rep.scheme.value] = rep
        for db, p, r, src in zip(rep.snr_grid_db, rep.outage_values, rep.rates, rep.sources):
            rows.append({"scheme": rep.scheme.value, "gamma_m_db": db, "ro_m": r.ro_m, "ro_s": r.ro_s,
                         "p_out_overall": p, "source": src, "fitted_order": rep.fitted_slope,
                         "claimed_order": rep.claimed_order})
    meta = _base_metadata("diversity", config, trials, seed, rs=rs, p_int_constraint=p_int_constraint,
                          fitted_orders={k: round(v.fitted_slope, 6) for k, v in reports.items()})
    return SweepResult("diversity", list(DIVERSITY_COLUMNS), rows, meta), reports
