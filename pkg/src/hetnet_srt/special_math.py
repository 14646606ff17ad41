"""Numeric helpers: exponential integral, the outage/intercept integral kernel,
monotone bisection and log-log slope fitting."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

EULER_GAMMA = 0.57721566490153286061

# Kronrod 15-point nodes on [0, 1]; odd indices are the embedded 7-point Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[[13, 11, 9]] = _WG[:3]
_GAUSS_W[7] = _WG[3]


class DomainError(ValueError):
    """Argument outside the domain of a numeric routine."""


class BracketError(ValueError):
    """Root-finding bracket does not contain a sign change."""


class ConvergenceError(ArithmeticError):
    """Adaptive quadrature did not reach tolerance; carries the best estimate."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.abs_tol < 0.0:
            raise ValueError(f"abs_tol must be >= 0, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise ValueError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")


DEFAULT_QUAD = QuadratureSpec()


# ---------------------------------------------------------------------------
# Exponential integral E1(x) = int_x^inf exp(-t)/t dt
# ---------------------------------------------------------------------------

def _e1_series(x: float) -> float:
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -x / k
        add = term / k
        total += add
        if abs(add) < 1e-17 * max(abs(total), 1e-300):
            break
        k += 1
    return -EULER_GAMMA - math.log(x) - total


def _scaled_e1_cf(x: float) -> float:
    """exp(x)*E1(x) by the modified Lentz continued fraction, x > 1."""
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise ConvergenceError(f"E1 continued fraction failed at x={x}", h, float("nan"))


def exp_integral_e1(theta: float) -> float:
    """E1(theta), the integral of exp(-t)/t from theta to infinity.

    This is the upper-tail form, not the principal-value Ei.
    """
    theta = float(theta)
    if not theta > 0.0:
        raise DomainError(f"E1 requires theta > 0, got {theta}")
    if theta <= 1.0:
        return _e1_series(theta)
    if theta > 745.0:
        return 0.0
    return math.exp(-theta) * _scaled_e1_cf(theta)


def scaled_e1(theta: float) -> float:
    """exp(theta) * E1(theta), finite for any theta > 0."""
    theta = float(theta)
    if not theta > 0.0:
        raise DomainError(f"E1 requires theta > 0, got {theta}")
    if theta <= 1.0:
        return math.exp(theta) * _e1_series(theta)
    return _scaled_e1_cf(theta)


def xexe1(psi: float) -> float:
    """psi * exp(psi) * E1(psi); increases from 0 (psi -> 0) to 1 (psi -> inf)."""
    if psi == 0.0:
        return 0.0
    if math.isinf(psi):
        return 1.0
    return psi * scaled_e1(psi)


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod
# ---------------------------------------------------------------------------

def _gk15(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float) -> tuple[float, float]:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    fx = f(mid + half * _NODES)
    k = half * float(_KRONROD_W @ fx)
    g = half * float(_GAUSS_W @ fx)
    return k, abs(k - g)


def adaptive_gk(
    f: Callable[[np.ndarray], np.ndarray],
    breakpoints: Sequence[float],
    spec: QuadratureSpec = DEFAULT_QUAD,
) -> tuple[float, float]:
    """Globally adaptive G7-K15 over consecutive breakpoint intervals.

    ``f`` must accept a numpy array of abscissae. Returns ``(value, error)``.
    Raises ConvergenceError when ``max_subdivisions`` bisections do not suffice.
    """
    heap: list[tuple[float, float, float, float]] = []
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        if hi > lo:
            val, err = _gk15(f, lo, hi)
            heapq.heappush(heap, (-err, lo, hi, val))
    total = sum(item[3] for item in heap)
    error = sum(-item[0] for item in heap)
    splits = 0
    while error > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if splits >= spec.max_subdivisions:
            raise ConvergenceError(
                f"quadrature error {error:.3e} above tolerance after {splits} subdivisions",
                total, error)
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        left = _gk15(f, lo, mid)
        right = _gk15(f, mid, hi)
        heapq.heappush(heap, (-left[1], lo, mid, left[0]))
        heapq.heappush(heap, (-right[1], mid, hi, right[0]))
        total = sum(item[3] for item in heap)
        error = sum(-item[0] for item in heap)
        splits += 1
    return total, error


def srt_integral(a: float, b: float, sigma2: float, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """I(a, b, s) = int_0^inf (s x / (a + s x)) exp(-x - b / (s x)) dx.

    Equals Pr(s X / (a + s X) style ratio events) for X ~ Exp(1); the value
    lies in [0, 1] and decreases in both ``a`` and ``b``.
    """
    if a < 0 or b < 0:
        raise DomainError(f"srt_integral needs a >= 0 and b >= 0, got a={a}, b={b}")
    if not sigma2 > 0:
        raise DomainError(f"srt_integral needs sigma2 > 0, got {sigma2}")
    if a == 0.0 and b == 0.0:
        return 1.0
    if math.isinf(a) or math.isinf(b):
        return 0.0

    def integrand(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        xp = x[pos]
        sx = sigma2 * xp
        out[pos] = sx / (a + sx) * np.exp(-xp - b / sx)
        return out

    peak = math.sqrt(b / sigma2)
    # exp(-x) bounds the integrand, so the tail beyond peak + 50 is below e^-50
    upper = peak + max(50.0, -math.log(spec.abs_tol) if spec.abs_tol > 0 else 50.0)
    points = [0.0, peak, upper] if peak > 0 else [0.0, upper]
    value, _ = adaptive_gk(integrand, points, spec)
    return value


# ---------------------------------------------------------------------------
# Root finding and slope fitting
# ---------------------------------------------------------------------------

def bisect_monotone(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of a monotone function on [lo, hi] by bisection."""
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0 or math.isnan(flo) or math.isnan(fhi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def loglog_slope(points: Iterable[tuple[float, float]]) -> float:
    """Least-squares diversity estimate: minus the slope of log P against log SNR."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise DomainError("loglog_slope needs at least two (snr, probability) points")
    if np.any(pts <= 0) or not np.all(np.isfinite(pts)):
        raise DomainError("loglog_slope needs positive, finite snr and probability values")
    slope = np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)[0]
    return float(-slope) + 0.0
