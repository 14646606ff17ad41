import math
from dataclasses import replace

import numpy as np
import pytest

from hetnet_srt import analytic, asymptotics as asy
from hetnet_srt.model import BASELINE, RatePair
from hetnet_srt.special_math import BracketError, DomainError

HIGH = BASELINE.with_snr_db(60)


def test_oss_asymptotic_examples():
    r = RatePair.symmetric(1.0, 0.5)
    assert asy.oss_asymptotic_outage(BASELINE, r, 1.0, 1.0) == (0.0, 0.0)
    out_m, _ = asy.oss_asymptotic_outage(BASELINE, r, 0.1, 0.1)
    assert out_m == pytest.approx(0.99, abs=1e-12)
    # cross-check against the exact outage at 80 dB with exactly inverted rates
    cfg = BASELINE.with_snr_db(80)
    rates = asy.oss_rates_for_intercept(cfg, 0.5, 0.5, 0.1, 0.1)
    assert analytic.oss_point(cfg, rates).p_out_m == pytest.approx(0.99, rel=1e-6)
    assert asy.oss_asymptotic_outage(BASELINE, r, 1e-9, 1e-9)[0] == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DomainError):
        asy.oss_asymptotic_outage(BASELINE, r, 0.0, 0.5)


def test_oss_inversion_is_exact_at_any_snr():
    for db in (10, 25, 60):
        cfg = BASELINE.with_snr_db(db)
        rates = asy.oss_rates_for_intercept(cfg, 0.5, 0.4, 0.03, 0.2)
        p = analytic.oss_point(cfg, rates)
        assert p.p_int_m == pytest.approx(0.03, rel=1e-12)
        assert p.p_int_s == pytest.approx(0.2, rel=1e-12)


def test_il_uss_phi_and_limits():
    assert asy._il_uss_phi(BASELINE, 0.5, 0.5) == (1.0, 1.0)
    with pytest.raises(DomainError):
        asy.il_uss_asymptotic_outage(replace(BASELINE, beta=0.0), RatePair.symmetric(1, 0.5), 0.1, 0.1)
    out = asy.il_uss_asymptotic_outage(BASELINE, RatePair.symmetric(1, 0.5), 1e-12, 1e-12)
    assert out[0] == pytest.approx(1.0, abs=1e-9) and out[1] == pytest.approx(1.0, abs=1e-9)


def test_il_uss_limit_matches_exact_at_60db():
    rates = asy.il_uss_limit_rates(HIGH, 0.5, 0.5, 0.05, 0.05)
    exact = analytic.il_uss_point(HIGH, rates)
    a_m, a_s = asy.il_uss_asymptotic_outage(HIGH, rates, 0.05, 0.05)
    assert a_m == pytest.approx(exact.p_out_m, rel=0.02)
    assert a_s == pytest.approx(exact.p_out_s, rel=0.02)


@pytest.mark.parametrize("target", [0.9, 0.5, 0.1, 0.01])
def test_rate_solvers_invert_their_intercepts(target):
    rm = asy.ic_uss_solve_rate_macro(HIGH, 0.5, target)
    rs = asy.ic_uss_solve_rate_small(HIGH, 0.5, target)
    assert abs(asy.ic_uss_limit_intercept_macro(HIGH, 0.5, rm) - target) <= 1e-6
    assert abs(asy.ic_uss_limit_intercept_small(HIGH, 0.5, rs) - target) <= 1e-6
    fin = asy.ic_uss_rates_for_intercept(HIGH, 0.5, 0.5, target, target)
    p = analytic.ic_uss_point(HIGH, fin)
    assert abs(p.p_int_m - target) <= 1e-6 and abs(p.p_int_s - target) <= 1e-6
    il = asy.il_uss_rates_for_intercept(HIGH, 0.5, 0.5, target, target)
    p = analytic.il_uss_point(HIGH, il)
    assert abs(p.p_int_m - target) <= 1e-6 and abs(p.p_int_s - target) <= 1e-6


def test_ic_uss_macro_solver_examples():
    assert asy.ic_uss_solve_rate_macro(HIGH, 0.5, 1.0) == 0.5
    assert asy.ic_uss_solve_rate_macro(HIGH, 0.5, 0.999999) == pytest.approx(0.5, abs=1e-3)
    assert asy.ic_uss_solve_rate_small(HIGH, 0.5, 1.0) == 0.5
    rates = [asy.ic_uss_solve_rate_macro(HIGH, 0.5, p) for p in (0.5, 0.1, 0.01)]
    assert rates[0] < rates[1] < rates[2]
    r = asy.ic_uss_solve_rate_macro(HIGH, 0.5, 0.1)
    forward = analytic.ic_uss_point(HIGH, RatePair(r, 1.0, 0.5, 0.5)).p_int_m
    assert forward == pytest.approx(0.1, rel=0.02)


def test_ic_uss_macro_solver_bracket_error():
    # beta*sigma2_sm = sigma2_mm leaves no power for any redundancy
    cfg = replace(HIGH, beta=10.0)
    with pytest.raises(BracketError):
        asy.ic_uss_solve_rate_macro(cfg, 0.5, 0.1)


def test_bisection_reproduces_root_of_intercept_residual():
    target = 0.05
    r = asy.ic_uss_solve_rate_macro(BASELINE, 0.5, target)
    again = asy.ic_uss_solve_rate_macro(BASELINE, 0.5, target)
    assert r == again
    lo = asy.ic_uss_limit_intercept_macro(BASELINE, 0.5, r - 1e-9)
    hi = asy.ic_uss_limit_intercept_macro(BASELINE, 0.5, r + 1e-9)
    assert lo >= target >= hi


def test_ic_uss_asymptotic_outage_power_law():
    rates = RatePair(2.0, 1.0, 0.5, 0.5)
    values = [asy.ic_uss_asymptotic_outage(BASELINE.with_snr_db(db), rates)[0] * 10 ** (db / 10)
              for db in (40, 45, 50, 55, 60)]
    assert (max(values) - min(values)) / min(values) < 1e-12
    a = asy.ic_uss_asymptotic_outage(replace(BASELINE, gamma_m=1e5), rates)[0]
    b = asy.ic_uss_asymptotic_outage(replace(BASELINE, gamma_m=2e5), rates)[0]
    assert b == pytest.approx(a / 2, rel=1e-14)
    assert asy.ic_uss_asymptotic_outage(BASELINE, RatePair(2.0, 0.0, 0.5, 0.0))[1] == 0.0


def test_ic_uss_small_floor_matches_exact_at_60db():
    rates = RatePair(1.0, 1.0, 0.5, 0.5)
    floor = asy.ic_uss_asymptotic_outage(HIGH, rates)[1]
    assert floor == pytest.approx(analytic.ic_uss_outage_small(HIGH, 1.0), rel=0.02)


@pytest.mark.parametrize("scheme, lo, hi", [("oss", -0.05, 0.05), ("il-uss", -0.05, 0.05), ("ic-uss", 0.9, 1.1)])
def test_diversity_orders(scheme, lo, hi):
    rep = asy.diversity_report(BASELINE, scheme, 0.05, [40, 45, 50, 55, 60], trials=1000)
    assert lo <= rep.fitted_slope <= hi
    assert rep.claimed_order == asy.CLAIMED_ORDER[rep.scheme]
    assert rep.snr_grid_db == pytest.approx([40, 45, 50, 55, 60])


def test_diversity_report_grid_checks():
    with pytest.raises(DomainError):
        asy.diversity_report(BASELINE, "oss", 0.05, [40, 45, 50])
    with pytest.raises(DomainError):
        asy.DiversityReport(asy.Scheme.OSS, [2.0, 1.0], [0.5, 0.5], 0.0, 0)
