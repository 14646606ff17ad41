"""Closed-form outage and intercept probabilities for the three schemes.

OSS and IL-USS expressions are exact. For IC-USS the macro outage is exact
while the small-cell outage and both intercept probabilities hold in the
regime ``2**R * sigma2_sm -> 0``; those components are flagged ``asymptotic``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import RatePair, Scheme, SystemConfig, require_valid
from .special_math import DEFAULT_QUAD, DomainError, QuadratureSpec, scaled_e1, srt_integral

EXACT = "exact"
ASYMPTOTIC = "asymptotic"

# Relative slack for floating-point round-off when checking [0, 1] membership.
_PROB_SLACK = 1e-12


class DegenerateRegimeError(DomainError):
    """IC-USS intercept closed form is undefined (non-positive Omega)."""


@dataclass(frozen=True)
class SrtPoint:
    p_out_m: float
    p_out_s: float
    p_int_m: float
    p_int_s: float
    exactness: dict = field(default_factory=lambda: dict.fromkeys(
        ("p_out_m", "p_out_s", "p_int_m", "p_int_s"), EXACT))

    def __post_init__(self):
        for name in ("p_out_m", "p_out_s", "p_int_m", "p_int_s"):
            value = getattr(self, name)
            if not (-_PROB_SLACK <= value <= 1.0 + _PROB_SLACK):
                raise AssertionError(f"{name}={value!r} is not a probability")

    @property
    def p_out_overall(self) -> float:
        return self.p_out_m * self.p_out_s

    @property
    def p_int_overall(self) -> float:
        return self.p_int_m * self.p_int_s

    @property
    def iop(self) -> float:
        return self.p_out_overall + self.p_int_overall

    @property
    def is_exact(self) -> bool:
        return all(v == EXACT for v in self.exactness.values())


def _excess(rate: float, bandwidth: float = 1.0) -> float:
    """2**(rate/bandwidth) - 1, the SNR needed to support ``rate``."""
    return math.expm1(rate / bandwidth * math.log(2.0))


# ---------------------------------------------------------------------------
# OSS
# ---------------------------------------------------------------------------

def _rayleigh_link(rate: float, redundancy: float, fraction: float, snr: float,
                   var_main: float, var_eve: float) -> tuple[float, float]:
    if fraction == 0.0 or snr == 0.0:
        # no bandwidth or no power: capacity is identically zero
        return (1.0 if rate > 0 else 0.0), 0.0
    delta = _excess(rate, fraction) / snr
    delta_d = _excess(redundancy, fraction) / snr
    p_out = -math.expm1(-delta / var_main)
    p_int = math.exp(-delta_d / var_eve)
    return p_out, p_int


def oss_point(config: SystemConfig, rates: RatePair) -> SrtPoint:
    require_valid(config, Scheme.OSS)
    c = config
    out_m, int_m = _rayleigh_link(rates.ro_m, rates.ro_m - rates.rs_m, c.alpha, c.gamma_m,
                                  c.sigma2_mm, c.sigma2_me)
    out_s, int_s = _rayleigh_link(rates.ro_s, rates.ro_s - rates.rs_s, 1.0 - c.alpha, c.gamma_s,
                                  c.sigma2_ss, c.sigma2_se)
    return SrtPoint(out_m, out_s, int_m, int_s)


# ---------------------------------------------------------------------------
# IL-USS
# ---------------------------------------------------------------------------

def il_uss_point(config: SystemConfig, rates: RatePair) -> SrtPoint:
    require_valid(config, Scheme.IL_USS)
    c = config
    gm, gs = c.gamma_m, c.gamma_s

    lam_m = _excess(rates.ro_m) / gm
    lam_md = _excess(rates.ro_m - rates.rs_m) / gm
    out_m = 1.0 - c.sigma2_mm / (gs * c.sigma2_sm * lam_m + c.sigma2_mm) * math.exp(-lam_m / c.sigma2_mm)
    int_m = c.sigma2_me / (c.sigma2_me + gs * c.sigma2_se * lam_md) * math.exp(-lam_md / c.sigma2_me)

    if gs == 0.0:
        out_s = 1.0 if rates.ro_s > 0 else 0.0
        int_s = 0.0
    else:
        lam_s = _excess(rates.ro_s) / gs
        lam_sd = _excess(rates.ro_s - rates.rs_s) / gs
        out_s = 1.0 - c.sigma2_ss / (gm * c.sigma2_ms * lam_s + c.sigma2_ss) * math.exp(-lam_s / c.sigma2_ss)
        int_s = c.sigma2_se / (c.sigma2_se + gm * c.sigma2_me * lam_sd) * math.exp(-lam_sd / c.sigma2_se)
    return SrtPoint(out_m, out_s, int_m, int_s)


# ---------------------------------------------------------------------------
# IC-USS
# ---------------------------------------------------------------------------

def ic_uss_outage_macro(config: SystemConfig, ro_m: float) -> float:
    """Exact MBS-MU outage; the cancelation leaves an interference-free link."""
    lam_m = _excess(ro_m) / config.gamma_m
    return -math.expm1(-lam_m / (config.sigma2_mm - config.beta * config.sigma2_sm))


def ic_uss_outage_small(config: SystemConfig, ro_s: float,
                        quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    c = config
    if c.gamma_s == 0.0:
        return 1.0 if ro_s > 0 else 0.0
    lam_s = _excess(ro_s) / c.gamma_s
    return 1.0 - srt_integral(c.sigma2_ms * lam_s * c.gamma_m, lam_s, c.sigma2_ss, quad)


def ic_uss_omega(config: SystemConfig, redundancy_m: float) -> float:
    return 1.0 - config.sigma2_sm * config.beta * 2.0 ** redundancy_m / config.sigma2_mm


def ic_uss_intercept_macro(config: SystemConfig, redundancy_m: float) -> float:
    """MBS-E intercept probability, Theta * exp(Theta - L/(s_me*Omega)) * E1(Theta)."""
    c = config
    lam_md = _excess(redundancy_m) / c.gamma_m
    if lam_md == 0.0:
        return 1.0
    omega = ic_uss_omega(c, redundancy_m)
    if omega <= 0.0:
        raise DegenerateRegimeError(
            f"Omega={omega:.4g} <= 0 at redundancy {redundancy_m:g} bit/s/Hz; "
            "the closed-form MBS-E intercept probability does not apply")
    rayleigh = math.exp(-lam_md / (c.sigma2_me * omega))
    if c.gamma_s == 0.0:
        return rayleigh
    theta = omega * c.sigma2_me / (lam_md * c.sigma2_se * c.gamma_s)
    return theta * scaled_e1(theta) * rayleigh


def ic_uss_intercept_small(config: SystemConfig, redundancy_s: float,
                           quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    c = config
    if c.gamma_s == 0.0:
        return 0.0
    lam_sd = _excess(redundancy_s) / c.gamma_s
    return srt_integral(c.sigma2_me * lam_sd * c.gamma_m, lam_sd, c.sigma2_se, quad)


def ic_uss_point(config: SystemConfig, rates: RatePair, quad: QuadratureSpec = DEFAULT_QUAD) -> SrtPoint:
    require_valid(config, Scheme.IC_USS)
    return SrtPoint(
        p_out_m=ic_uss_outage_macro(config, rates.ro_m),
        p_out_s=ic_uss_outage_small(config, rates.ro_s, quad),
        p_int_m=ic_uss_intercept_macro(config, rates.ro_m - rates.rs_m),
        p_int_s=ic_uss_intercept_small(config, rates.ro_s - rates.rs_s, quad),
        exactness={"p_out_m": EXACT, "p_out_s": ASYMPTOTIC,
                   "p_int_m": ASYMPTOTIC, "p_int_s": ASYMPTOTIC},
    )


def ic_uss_validity(config: SystemConfig, rates: RatePair) -> float:
    """Largest ``2**R * sigma2_sm`` over both links; small values mean the
    asymptotic IC-USS expressions are trustworthy."""
    return config.sigma2_sm * 2.0 ** max(rates.ro_m, rates.ro_s)


def point(scheme: "Scheme | str", config: SystemConfig, rates: RatePair,
          quad: QuadratureSpec = DEFAULT_QUAD) -> SrtPoint:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.OSS:
        return oss_point(config, rates)
    if scheme is Scheme.IL_USS:
        return il_uss_point(config, rates)
    return ic_uss_point(config, rates, quad)
