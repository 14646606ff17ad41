"""High-SNR behavior under a per-link intercept constraint.

Covers the constraint-to-rate inversions, the limiting outage expressions of
each scheme, and numeric verification of the secrecy diversity order
(minus the log-log slope of overall outage against the MBS SNR).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from . import analytic
from .model import RatePair, Scheme, SystemConfig, db_to_linear, require_valid
from .special_math import (
    BracketError, DomainError, bisect_monotone, loglog_slope, xexe1,
)

RATE_CEILING = 30.0
RATE_FLOOR_OFFSET = 1e-9
RATE_TOL = 1e-9

CLAIMED_ORDER = {Scheme.OSS: 0, Scheme.IL_USS: 0, Scheme.IC_USS: 1}


def _check_target(p: float, name: str, allow_one: bool = True) -> None:
    upper_ok = p <= 1.0 if allow_one else p < 1.0
    if not (p > 0.0 and upper_ok):
        raise DomainError(f"{name} must lie in (0, 1{']' if allow_one else ')'}, got {p}")


def _solve_decreasing(func, target: float, lo: float, hi: float) -> float:
    """Rate in [lo, hi] where the decreasing intercept ``func`` equals ``target``."""
    return bisect_monotone(lambda r: func(r) - target, lo, hi, RATE_TOL)


# ---------------------------------------------------------------------------
# OSS
# ---------------------------------------------------------------------------

def oss_rates_for_intercept(config: SystemConfig, rs_m: float, rs_s: float,
                            p_int_m: float, p_int_s: float) -> RatePair:
    """Exact inversion of the OSS intercept probabilities (valid at any SNR)."""
    _check_target(p_int_m, "p_int_m")
    _check_target(p_int_s, "p_int_s")
    c = config
    a = c.alpha
    if not 0.0 < a < 1.0:
        raise DomainError(f"OSS rate inversion needs alpha in (0, 1), got {a}")
    ro_m = rs_m + a * math.log2(1.0 - c.gamma_m * c.sigma2_me * math.log(p_int_m))
    ro_s = rs_s + (1.0 - a) * math.log2(1.0 - c.gamma_s * c.sigma2_se * math.log(p_int_s))
    return RatePair(ro_m, ro_s, rs_m, rs_s)


def oss_asymptotic_outage(config: SystemConfig, rates: RatePair,
                          p_int_m: float, p_int_s: float) -> tuple[float, float]:
    """Limiting OSS outages; independent of the SNR."""
    _check_target(p_int_m, "p_int_m")
    _check_target(p_int_s, "p_int_s")
    c = config
    if not 0.0 < c.alpha < 1.0:
        raise DomainError(f"OSS asymptotics need alpha in (0, 1), got {c.alpha}")
    exp_m = 2.0 ** (rates.rs_m / c.alpha) * c.sigma2_me / c.sigma2_mm
    exp_s = 2.0 ** (rates.rs_s / (1.0 - c.alpha)) * c.sigma2_se / c.sigma2_ss
    return 1.0 - p_int_m ** exp_m, 1.0 - p_int_s ** exp_s


# ---------------------------------------------------------------------------
# IL-USS
# ---------------------------------------------------------------------------

def _il_uss_phi(config: SystemConfig, p_int_m: float, p_int_s: float) -> tuple[float, float]:
    phi_me = (1.0 / p_int_m - 1.0) * config.sigma2_me / config.sigma2_se
    phi_se = (1.0 / p_int_s - 1.0) * config.sigma2_se / config.sigma2_me
    return phi_me, phi_se


def il_uss_limit_rates(config: SystemConfig, rs_m: float, rs_s: float,
                       p_int_m: float, p_int_s: float) -> RatePair:
    """Rates meeting the intercept targets as the SNR grows without bound."""
    _check_target(p_int_m, "p_int_m")
    _check_target(p_int_s, "p_int_s")
    beta = config.beta
    if beta <= 0:
        raise DomainError("IL-USS limiting rates need beta > 0")
    phi_me, phi_se = _il_uss_phi(config, p_int_m, p_int_s)
    ro_m = rs_m + math.log2(1.0 + phi_me / beta)
    ro_s = rs_s + math.log2(1.0 + beta * phi_se)
    return RatePair(ro_m, ro_s, rs_m, rs_s)


def il_uss_asymptotic_outage(config: SystemConfig, rates: RatePair,
                             p_int_m: float, p_int_s: float) -> tuple[float, float]:
    _check_target(p_int_m, "p_int_m")
    _check_target(p_int_s, "p_int_s")
    c = config
    beta = c.beta
    if beta <= 0:
        raise DomainError("IL-USS asymptotics are undefined for beta = 0")
    phi_me, phi_se = _il_uss_phi(c, p_int_m, p_int_s)
    two_m = 2.0 ** rates.rs_m
    two_s = 2.0 ** rates.rs_s
    num_m = beta * c.sigma2_sm * (two_m - 1.0) + phi_me * c.sigma2_sm * two_m
    num_s = c.sigma2_ms * (two_s - 1.0) + beta * phi_se * c.sigma2_ms * two_s
    return num_m / (c.sigma2_mm + num_m), num_s / (beta * c.sigma2_ss + num_s)


def il_uss_rates_for_intercept(config: SystemConfig, rs_m: float, rs_s: float,
                               p_int_m: float, p_int_s: float) -> RatePair:
    """Rates meeting the intercept targets exactly at the configured SNR."""
    _check_target(p_int_m, "p_int_m", allow_one=False)
    _check_target(p_int_s, "p_int_s", allow_one=False)

    def p_m(r):
        return analytic.il_uss_point(config, RatePair(r, rs_s, rs_m, rs_s)).p_int_m

    def p_s(r):
        return analytic.il_uss_point(config, RatePair(rs_m, r, rs_m, rs_s)).p_int_s

    ro_m = _solve_decreasing(p_m, p_int_m, rs_m + RATE_FLOOR_OFFSET, RATE_CEILING)
    ro_s = _solve_decreasing(p_s, p_int_s, rs_s + RATE_FLOOR_OFFSET, RATE_CEILING)
    return RatePair(ro_m, ro_s, rs_m, rs_s)


# ---------------------------------------------------------------------------
# IC-USS
# ---------------------------------------------------------------------------

def _max_redundancy_macro(config: SystemConfig) -> float:
    """Redundancy at which Omega reaches zero (infinite when beta = 0)."""
    if config.beta == 0:
        return math.inf
    return math.log2(config.sigma2_mm / (config.beta * config.sigma2_sm))


def ic_uss_theta_limit(config: SystemConfig, rs_m: float, ro_m: float) -> float:
    c = config
    two_d = 2.0 ** (ro_m - rs_m)
    num = c.sigma2_mm * c.sigma2_me - c.beta * c.sigma2_sm * c.sigma2_me * two_d
    den = c.beta * c.sigma2_mm * c.sigma2_se * (two_d - 1.0)
    return num / den


def ic_uss_limit_intercept_macro(config: SystemConfig, rs_m: float, ro_m: float) -> float:
    """High-SNR MBS-E intercept probability as a function of the overall rate."""
    if ro_m <= rs_m:
        return 1.0
    theta = ic_uss_theta_limit(config, rs_m, ro_m)
    if theta <= 0:
        raise analytic.DegenerateRegimeError(
            f"rate {ro_m:g} leaves no power margin for the MBS-E closed form (Theta={theta:.3g})")
    return xexe1(theta)


def ic_uss_psi_se(config: SystemConfig, rs_s: float, ro_s: float) -> float:
    c = config
    return c.sigma2_me * (2.0 ** (ro_s - rs_s) - 1.0) / (c.beta * c.sigma2_se)


def ic_uss_limit_intercept_small(config: SystemConfig, rs_s: float, ro_s: float) -> float:
    return 1.0 - xexe1(ic_uss_psi_se(config, rs_s, ro_s))


def _ic_uss_precheck(config: SystemConfig, target: float) -> None:
    _check_target(target, "p_int_target")
    require_valid(config, Scheme.IC_USS)
    if config.beta <= 0:
        raise DomainError("IC-USS rate solving needs beta > 0")


def ic_uss_solve_rate_macro(config: SystemConfig, rs_m: float, p_int_target: float) -> float:
    """Overall MBS rate whose high-SNR intercept probability equals the target."""
    _ic_uss_precheck(config, p_int_target)
    if p_int_target == 1.0:
        return rs_m
    d_max = _max_redundancy_macro(config)
    if not d_max > 0:
        raise BracketError("Omega is non-positive for every rate; no macro rate meets the target")
    hi = min(RATE_CEILING, rs_m + d_max * (1.0 - 1e-12))
    return _solve_decreasing(lambda r: ic_uss_limit_intercept_macro(config, rs_m, r),
                             p_int_target, rs_m + RATE_FLOOR_OFFSET, hi)


def ic_uss_solve_rate_small(config: SystemConfig, rs_s: float, p_int_target: float) -> float:
    """Overall SBS rate whose high-SNR intercept probability equals the target."""
    _ic_uss_precheck(config, p_int_target)
    if p_int_target == 1.0:
        return rs_s
    return _solve_decreasing(lambda r: ic_uss_limit_intercept_small(config, rs_s, r),
                             p_int_target, rs_s + RATE_FLOOR_OFFSET, RATE_CEILING)


def ic_uss_limit_rates(config: SystemConfig, rs_m: float, rs_s: float,
                       p_int_m: float, p_int_s: float) -> RatePair:
    return RatePair(ic_uss_solve_rate_macro(config, rs_m, p_int_m),
                    ic_uss_solve_rate_small(config, rs_s, p_int_s), rs_m, rs_s)


def ic_uss_rates_for_intercept(config: SystemConfig, rs_m: float, rs_s: float,
                               p_int_m: float, p_int_s: float) -> RatePair:
    """Rates meeting the (closed-form) intercept targets at the configured SNR."""
    _ic_uss_precheck(config, p_int_m)
    _check_target(p_int_s, "p_int_s", allow_one=False)
    _check_target(p_int_m, "p_int_m", allow_one=False)
    hi_m = min(RATE_CEILING, rs_m + _max_redundancy_macro(config) * (1.0 - 1e-12))
    ro_m = _solve_decreasing(lambda r: analytic.ic_uss_intercept_macro(config, r - rs_m),
                             p_int_m, rs_m + RATE_FLOOR_OFFSET, hi_m)
    ro_s = _solve_decreasing(lambda r: analytic.ic_uss_intercept_small(config, r - rs_s),
                             p_int_s, rs_s + RATE_FLOOR_OFFSET, RATE_CEILING)
    return RatePair(ro_m, ro_s, rs_m, rs_s)


def ic_uss_asymptotic_outage(config: SystemConfig, rates: RatePair) -> tuple[float, float]:
    """Macro outage decays as 1/gamma_m; small-cell outage tends to a floor."""
    require_valid(config, Scheme.IC_USS)
    c = config
    if c.beta <= 0:
        raise DomainError("IC-USS asymptotics need beta > 0")
    p_out_m = math.expm1(rates.ro_m * math.log(2.0)) / ((c.sigma2_mm - c.sigma2_sm * c.beta) * c.gamma_m)
    psi_ss = c.sigma2_ms * (2.0 ** rates.ro_s - 1.0) / (c.beta * c.sigma2_ss)
    return p_out_m, xexe1(psi_ss)


# ---------------------------------------------------------------------------
# Scheme-generic helpers
# ---------------------------------------------------------------------------

def rates_for_intercept(config: SystemConfig, scheme: "Scheme | str", rs: float,
                        p_int: float) -> RatePair:
    """Equal secrecy rate ``rs`` on both links, each meeting intercept ``p_int``
    at the configured SNR."""
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.OSS:
        return oss_rates_for_intercept(config, rs, rs, p_int, p_int)
    if scheme is Scheme.IL_USS:
        return il_uss_rates_for_intercept(config, rs, rs, p_int, p_int)
    return ic_uss_rates_for_intercept(config, rs, rs, p_int, p_int)


def asymptotic_outage(config: SystemConfig, scheme: "Scheme | str", rs: float,
                      p_int: float) -> tuple[float, float]:
    """Limiting per-link outages under an equal per-link intercept constraint."""
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.OSS:
        return oss_asymptotic_outage(config, RatePair.symmetric(rs, rs), p_int, p_int)
    if scheme is Scheme.IL_USS:
        return il_uss_asymptotic_outage(config, RatePair.symmetric(rs, rs), p_int, p_int)
    return ic_uss_asymptotic_outage(config, ic_uss_limit_rates(config, rs, rs, p_int, p_int))


@dataclass
class DiversityReport:
    scheme: Scheme
    snr_grid: list[float]
    outage_values: list[float]
    fitted_slope: float
    claimed_order: int
    rates: list[RatePair] = field(default_factory=list)
    sources: list[str] = field(default_factory=list)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.snr_grid, self.snr_grid[1:])):
            raise DomainError("snr grid must be strictly increasing")
        if any(not 0.0 < p <= 1.0 for p in self.outage_values):
            raise DomainError("outage values must lie in (0, 1]")

    @property
    def snr_grid_db(self) -> list[float]:
        return [10.0 * math.log10(g) for g in self.snr_grid]


def diversity_rates(config: SystemConfig, scheme: Scheme, rs: float, p_int: float) -> RatePair:
    """Constraint-meeting rates used for diversity fitting.

    OSS uses its exact inversion, IL-USS the limiting inversion and IC-USS a
    numeric solve of its closed-form intercept probabilities at this SNR.
    """
    if scheme is Scheme.OSS:
        return oss_rates_for_intercept(config, rs, rs, p_int, p_int)
    if scheme is Scheme.IL_USS:
        return il_uss_limit_rates(config, rs, rs, p_int, p_int)
    return ic_uss_rates_for_intercept(config, rs, rs, p_int, p_int)


def diversity_report(config: SystemConfig, scheme: "Scheme | str", p_int: float,
                     snr_grid_db: Sequence[float], rs: float = 0.5, *,
                     trials: int = 1_000_000, seed: int = 0) -> DiversityReport:
    """Fit the secrecy diversity order over an SNR grid.

    The overall outage is taken from the closed forms; if those are undefined
    at some grid point the Monte Carlo estimate is used instead.
    """
    from .montecarlo import estimate_point

    scheme = Scheme.parse(scheme)
    grid = [float(x) for x in snr_grid_db]
    if len(grid) < 4 or max(grid) - min(grid) < 20.0:
        raise DomainError("diversity fitting needs >= 4 SNR points spanning >= 20 dB")
    outages, rates, sources = [], [], []
    for db in grid:
        cfg = config.with_snr_db(db)
        r = diversity_rates(cfg, scheme, rs, p_int)
        try:
            value = analytic.point(scheme, cfg, r).p_out_overall
            source = "analytic"
        except (analytic.DegenerateRegimeError, ArithmeticError):
            value = estimate_point(cfg, r, scheme, trials, seed).p_out_overall
            source = "montecarlo"
        outages.append(value)
        rates.append(r)
        sources.append(source)
    snrs = [db_to_linear(db) for db in grid]
    slope = loglog_slope(zip(snrs, outages))
    return DiversityReport(scheme, snrs, outages, slope, CLAIMED_ORDER[scheme], rates, sources)
