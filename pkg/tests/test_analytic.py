import math
from dataclasses import replace

import numpy as np
import pytest

from hetnet_srt import analytic
from hetnet_srt.analytic import ASYMPTOTIC, EXACT, DegenerateRegimeError, SrtPoint, point
from hetnet_srt.model import BASELINE, RatePair, SystemConfig
from hetnet_srt.montecarlo import estimate_point

TOY = SystemConfig(gamma_m=10.0, beta=0.5, alpha=0.5)


def test_oss_examples():
    p = analytic.oss_point(TOY, RatePair(1.0, 1.0, 0.5, 0.5))
    assert p.p_out_m == pytest.approx(1 - math.exp(-0.3), abs=1e-12)
    assert p.p_out_m == pytest.approx(0.259182, abs=1e-6)
    assert analytic.oss_point(TOY, RatePair(1.0, 1.0, 1.0, 0.5)).p_int_m == 1.0
    assert analytic.oss_point(TOY, RatePair(0.0, 1.0, 0.0, 0.5)).p_out_m == 0.0


def test_oss_zero_bandwidth_edges():
    p = analytic.oss_point(replace(TOY, alpha=1.0), RatePair(1.0, 1.0, 0.5, 0.5))
    assert p.p_out_s == 1.0 and p.p_int_s == 0.0
    p = analytic.oss_point(replace(TOY, alpha=0.0), RatePair(1.0, 1.0, 0.5, 0.5))
    assert p.p_out_m == 1.0 and p.p_int_m == 0.0


def test_il_uss_examples():
    p = analytic.il_uss_point(TOY, RatePair(1.0, 1.0, 0.5, 0.5))
    assert p.p_out_m == pytest.approx(1 - math.exp(-0.1) / 1.05, abs=1e-12)
    assert p.p_out_m == pytest.approx(0.138250, abs=1e-6)
    lam = (math.sqrt(2) - 1) / 10
    assert p.p_int_m == pytest.approx(math.exp(-lam) / (1 + 5 * lam), abs=1e-12)
    assert p.p_int_m == pytest.approx(0.794814, abs=1e-6)


def test_il_uss_beta_zero_is_full_band_oss():
    r = RatePair(1.3, 1.0, 0.5, 0.5)
    il = analytic.il_uss_point(replace(TOY, beta=0.0), r)
    oss = analytic.oss_point(replace(TOY, alpha=1.0), r)
    assert il.p_out_m == pytest.approx(oss.p_out_m, rel=1e-14)
    assert il.p_int_m == pytest.approx(oss.p_int_m, rel=1e-14)


def test_ic_uss_examples():
    p = analytic.ic_uss_point(TOY, RatePair(1.0, 1.0, 0.5, 0.5))
    assert p.p_out_m == pytest.approx(1 - math.exp(-0.1 / 0.95), abs=1e-12)
    assert p.p_out_m == pytest.approx(0.099912, abs=1e-6)
    assert analytic.ic_uss_point(TOY, RatePair(1.0, 1.0, 1.0, 0.5)).p_int_m == 1.0
    assert p.exactness == {"p_out_m": EXACT, "p_out_s": ASYMPTOTIC, "p_int_m": ASYMPTOTIC, "p_int_s": ASYMPTOTIC}
    assert not p.is_exact
    assert analytic.oss_point(TOY, RatePair(1.0, 1.0, 0.5, 0.5)).is_exact


def test_ic_uss_degenerate_omega():
    # redundancy of 5 bits at beta*sigma2_sm = 0.05 drives Omega negative
    with pytest.raises(DegenerateRegimeError):
        analytic.ic_uss_intercept_macro(BASELINE, 5.0)


def test_ic_uss_small_cell_asymptotic_regime_against_mc():
    cfg = replace(BASELINE, sigma2_sm=0.01, sigma2_ms=0.01)
    rates = RatePair(1.0, 1.0, 0.5, 0.5)
    assert analytic.ic_uss_validity(cfg, rates) <= 0.02
    p = analytic.ic_uss_point(cfg, rates)
    est = estimate_point(cfg, rates, "ic-uss", 1_000_000, seed=7)
    assert est.p_int_m.value == pytest.approx(p.p_int_m, rel=0.05)
    assert est.p_int_s.value == pytest.approx(p.p_int_s, rel=0.05)
    assert est.p_out_s.value == pytest.approx(p.p_out_s, rel=0.05)


def test_probabilities_are_asserted_not_clamped():
    with pytest.raises(AssertionError):
        SrtPoint(1.5, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("scheme", ["oss", "il-uss", "ic-uss"])
def test_monotone_in_overall_rate(scheme):
    grid = np.linspace(0.5, 4.5, 41)
    pts = [point(scheme, BASELINE, RatePair.symmetric(r, 0.5)) for r in grid]
    for name in ("p_out_m", "p_out_s"):
        v = [getattr(p, name) for p in pts]
        assert all(b >= a for a, b in zip(v, v[1:])), name
    for name in ("p_int_m", "p_int_s"):
        v = [getattr(p, name) for p in pts]
        assert all(b <= a for a, b in zip(v, v[1:])), name


@pytest.mark.parametrize("scheme", ["oss", "il-uss"])
def test_exact_schemes_against_mc_at_baseline(scheme):
    rates = RatePair(2.0, 1.5, 0.5, 0.4)
    p = point(scheme, BASELINE, rates)
    est = estimate_point(BASELINE, rates, scheme, 1_000_000, seed=123)
    for name in ("p_out_m", "p_out_s", "p_int_m", "p_int_s"):
        assert abs(getattr(est, name).z_score(getattr(p, name))) <= 4, name


def test_overall_products():
    p = point("il-uss", BASELINE, RatePair.symmetric(2.0, 0.5))
    assert p.p_out_overall == p.p_out_m * p.p_out_s
    assert p.iop == p.p_out_overall + p.p_int_overall
