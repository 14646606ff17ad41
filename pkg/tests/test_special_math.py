import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from hetnet_srt.special_math import (
    BracketError, ConvergenceError, DomainError, QuadratureSpec, adaptive_gk, bisect_monotone,
    exp_integral_e1, loglog_slope, scaled_e1, srt_integral, xexe1,
)


def e1_by_quadrature(theta):
    value, _ = integrate.quad(lambda t: math.exp(-t) / t, theta, math.inf, epsabs=0, epsrel=1e-12, limit=200)
    return value


@pytest.mark.parametrize("theta, expected", [(1.0, 0.2193839), (0.1, 1.8229240)])
def test_e1_reference_values(theta, expected):
    assert exp_integral_e1(theta) == pytest.approx(e1_by_quadrature(theta), rel=1e-10)
    assert exp_integral_e1(theta) == pytest.approx(expected, abs=5e-8)


@pytest.mark.parametrize("theta", [1e-8, 1e-3, 0.5, 0.999, 1.0, 1.001, 2.5, 10.0, 50.0, 300.0])
def test_e1_matches_scipy_across_branches(theta):
    assert exp_integral_e1(theta) == pytest.approx(special.exp1(theta), rel=1e-13)
    assert scaled_e1(theta) == pytest.approx(special.exp1(theta) * math.exp(theta), rel=1e-12)


def test_scaled_e1_survives_large_arguments():
    # exp(1e4) overflows; the scaled form must not
    x = 1e4
    assert scaled_e1(x) == pytest.approx(1.0 / (x + 1.0), rel=1e-7)
    assert exp_integral_e1(x) == 0.0 or exp_integral_e1(x) < 1e-300


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
def test_e1_domain(bad):
    with pytest.raises(DomainError):
        exp_integral_e1(bad)


@given(st.floats(min_value=1e-6, max_value=700.0))
@settings(max_examples=200, deadline=None)
def test_e1_sandwich_bound(x):
    # 0.5*ln(1+2/x) < e^x E1(x) < ln(1+1/x)
    s = scaled_e1(x)
    assert 0.5 * math.log1p(2.0 / x) <= s * (1 + 1e-12)
    assert s <= math.log1p(1.0 / x) * (1 + 1e-12)


def test_xexe1_limits_and_monotonicity():
    assert xexe1(0.0) == 0.0
    assert xexe1(math.inf) == 1.0
    xs = np.geomspace(1e-6, 1e6, 200)
    values = [xexe1(x) for x in xs]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert all(0 < v < 1 for v in values)


def test_gk_integrates_polynomials_exactly():
    value, err = adaptive_gk(lambda x: 3 * x**5 - x**2 + 7, [0.0, 2.0], QuadratureSpec())
    assert value == pytest.approx(3 * 64 / 6 - 8 / 3 + 14, rel=1e-14)
    assert err < 1e-10


def test_gk_convergence_error_carries_estimate():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=0.0, max_subdivisions=2)
    with pytest.raises(ConvergenceError) as info:
        adaptive_gk(lambda x: np.sin(1.0 / (x + 1e-3)), [0.0, 1.0], spec)
    assert math.isfinite(info.value.estimate)
    assert info.value.error > 0


def test_srt_integral_trivial_cases():
    assert srt_integral(0.0, 0.0, 1.0) == 1.0
    assert srt_integral(math.inf, 0.1, 1.0) == 0.0
    assert srt_integral(1e12, 0.1, 1.0) < 1e-10


def test_srt_integral_monte_carlo_oracle():
    rng = np.random.default_rng(20240601)
    x = rng.exponential(1.0, 10_000_000)
    samples = x / (0.5 + x) * np.exp(-0.1 / x)
    mean = samples.mean()
    se = samples.std(ddof=1) / math.sqrt(x.size)
    assert abs(srt_integral(0.5, 0.1, 1.0) - mean) <= 4 * se


@pytest.mark.parametrize("a, b, s2", [(0.5, 0.1, 1.0), (3.0, 0.01, 0.3), (0.02, 4.0, 2.0), (100.0, 1e-4, 1.0)])
def test_srt_integral_matches_scipy(a, b, s2):
    f = lambda x: s2 * x / (a + s2 * x) * math.exp(-x - b / (s2 * x))
    ref, _ = integrate.quad(f, 0, math.inf, epsabs=1e-14, epsrel=1e-12, limit=500)
    assert srt_integral(a, b, s2) == pytest.approx(ref, rel=1e-7, abs=1e-12)


def test_srt_integral_monotone_in_parameters():
    vals_a = [srt_integral(a, 0.2, 1.0) for a in np.geomspace(1e-3, 1e3, 30)]
    vals_b = [srt_integral(0.5, b, 1.0) for b in np.geomspace(1e-4, 10, 30)]
    assert all(y < x for x, y in zip(vals_a, vals_a[1:]))
    assert all(y < x for x, y in zip(vals_b, vals_b[1:]))
    assert all(0 <= v <= 1 for v in vals_a + vals_b)


def test_srt_integral_domain():
    with pytest.raises(DomainError):
        srt_integral(-1.0, 0.1, 1.0)
    with pytest.raises(DomainError):
        srt_integral(1.0, 0.1, 0.0)


def test_bisect_examples():
    assert bisect_monotone(lambda x: x - 2, 0, 5, 1e-12) == pytest.approx(2.0, abs=1e-12)
    assert bisect_monotone(lambda x: math.exp(-x) - 0.5, 0, 10) == pytest.approx(math.log(2), abs=1e-9)


def test_bisect_requires_sign_change():
    with pytest.raises(BracketError):
        bisect_monotone(lambda x: x + 1, 0, 5)


def test_loglog_slope_power_laws():
    g = np.geomspace(1e4, 1e6, 5)
    assert loglog_slope(zip(g, 3.0 / g)) == pytest.approx(1.0, abs=1e-9)
    assert loglog_slope(zip(g, [0.2] * 5)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("points", [[(1.0, 0.5)], [(1.0, 0.5), (0.0, 0.1)], [(1.0, 0.5), (2.0, -0.1)]])
def test_loglog_slope_domain(points):
    with pytest.raises(DomainError):
        loglog_slope(points)
