"""Catalog integrity, truncation-order measurement, recurrence simulation."""

import math
from fractions import Fraction

import numpy as np
import pytest

import fdforge.validation as validation
from fdforge.charpoly import analyze_formula
from fdforge.taylor_system import DifferenceFormula, Dimensions
from fdforge.validation import (
    EXP,
    SIN,
    catalog,
    empirical_order,
    monomial,
    residual,
    simulate,
    validate_catalog,
)

F = Fraction


# ------------------------------------------------------------------- catalog


def test_catalog_has_six_entries_with_expected_labels():
    labels = [kf.label for kf in catalog()]
    assert labels == ["A", "B", "C", "D", "E", "F"]


def test_catalog_frozen_values():
    by_label = {kf.label: kf for kf in catalog()}
    assert by_label["A"].char_poly == (1, 0, -1)
    assert by_label["B"].char_poly == (2, -3, 2, -1)
    assert by_label["C"].char_poly == (6, -3, -2, -1)
    assert by_label["D"].char_poly == (5, -3, -1, -1)
    assert by_label["E"].char_poly == (8, 1, -6, -5, 2)
    assert by_label["F"].char_poly == (13, -6, -2, -4, -3, 2)
    assert [by_label[l].c for l in "ABCDEF"] == [
        F(2), F(1), F(5, 3), F(8, 5), F(9, 4), F(24, 13)
    ]
    assert [by_label[l].claimed_order for l in "ABCDEF"] == [2, 3, 3, 3, 4, 4]


def test_catalog_coefficients_sum_to_zero():
    for kf in catalog():
        assert sum(kf.char_poly) == 0  # p(1) = 0 in unnormalized form


def test_catalog_derivative_weight_consistency():
    # p'(1) = c for the normalized polynomial, exactly
    for kf in catalog():
        f = kf.to_formula()
        d = f.degree
        dp1 = sum(i * f.p[d - i] for i in range(1, d + 1))
        assert dp1 == kf.c, kf.label


def test_catalog_all_convergent():
    for kf in catalog():
        rep = analyze_formula(kf.to_formula())
        assert rep.convergent, kf.label


def test_catalog_e_matches_seed_session_polynomial():
    e = {kf.label: kf for kf in catalog()}["E"].to_formula()
    assert e.p == (F(1), F(1, 8), F(-3, 4), F(-5, 8), F(1, 4))
    assert e.dims == Dimensions(2, 2)


def test_catalog_second_magnitudes():
    # the two three-term formulas have simple closed-form root pairs
    by_label = {kf.label: kf for kf in catalog()}
    rep_b = analyze_formula(by_label["B"].to_formula())
    assert rep_b.second_magnitude == pytest.approx(math.sqrt(0.5), abs=1e-12)
    rep_c = analyze_formula(by_label["C"].to_formula())
    assert rep_c.second_magnitude == pytest.approx(1 / math.sqrt(6), abs=1e-12)
    rep_e = analyze_formula(by_label["E"].to_formula())
    assert rep_e.second_magnitude == pytest.approx(0.9025, abs=5e-4)


def test_source_notes_present():
    for kf in catalog():
        assert kf.source_note.strip()


# ------------------------------------------------------------------ residual


def test_euler_exact_on_quadratics():
    a = catalog()[0].to_formula()
    for t in (0.0, 0.37, -2.0):
        assert abs(residual(a, monomial(2), t, 0.05)) < 1e-14


def test_euler_exp_residual_is_cubic():
    a = catalog()[0].to_formula()
    for tau in (0.1, 0.01):
        r = residual(a, EXP, 0.0, tau)
        assert r == pytest.approx(math.exp(tau) - math.exp(-tau) - 2 * tau, abs=1e-16)
        assert r == pytest.approx(tau**3 / 3, rel=2e-3)


def test_three_term_formula_exact_on_quadratics():
    b = catalog()[1].to_formula()
    assert abs(residual(b, monomial(2), 1.3, 0.1)) < 1e-13


def test_residual_rejects_nonpositive_tau():
    a = catalog()[0].to_formula()
    with pytest.raises(ValueError):
        residual(a, EXP, 0.0, 0.0)
    with pytest.raises(ValueError):
        residual(a, EXP, 0.0, -0.1)


def test_monomial_basics():
    m = monomial(0)
    assert m.value(3.0) == 1.0
    assert m.derivative(3.0) == 0.0
    with pytest.raises(ValueError):
        monomial(-1)


# ------------------------------------------------------------ order checking


def test_catalog_orders_pass():
    for kf in catalog():
        res = empirical_order(kf.to_formula(), kf.claimed_order, formula_id=kf.label)
        assert res.passed, (kf.label, res.fitted_slope)
        assert not res.underflow


def test_catalog_fitted_slopes_near_expected():
    # measured decay rates: the symmetric Euler form gains an order on e^t
    expect = {"A": 3.0, "B": 3.0, "C": 3.0, "D": 3.0, "E": 4.0, "F": 4.0}
    for kf in catalog():
        res = empirical_order(kf.to_formula(), kf.claimed_order)
        assert res.fitted_slope == pytest.approx(expect[kf.label], abs=0.08)


def test_order_check_rejects_low_claim():
    with pytest.raises(ValueError):
        empirical_order(catalog()[0].to_formula(), 1)


def test_order_check_fails_overclaimed():
    # Euler measures slope ~3; claiming order 5 must fail
    res = empirical_order(catalog()[0].to_formula(), 5)
    assert not res.passed


def test_order_check_underflow_flag(monkeypatch):
    # all residuals under the noise floor -> unfittable, passes with a flag
    monkeypatch.setattr(validation, "residual", lambda *a, **k: 1e-20)
    res = empirical_order(catalog()[0].to_formula(), 4)
    assert res.passed
    assert res.underflow
    assert res.fitted_slope is None


def test_order_result_reports_all_taus():
    res = empirical_order(catalog()[4].to_formula(), 4, formula_id="E")
    assert res.formula_id == "E"
    assert len(res.taus) == 8
    assert res.taus[0] == 0.125
    assert res.taus[-1] == 2.0**-10
    assert len(res.residuals) == 8


# ------------------------------------------------------------------ simulate


def test_simulate_e_on_sin_regression():
    e = catalog()[4].to_formula()
    run = simulate(e, SIN, 0.01, 1000)
    assert not run.diverged
    # frozen regression baseline from the first validated run
    assert run.max_error == pytest.approx(3.8885272679589633e-07, rel=1e-6)
    assert run.function_id == "sin"
    assert run.steps == 1000


def test_simulate_halving_tau_shrinks_error():
    for kf in catalog():
        f = kf.to_formula()
        coarse = simulate(f, SIN, 0.01, 1000)
        fine = simulate(f, SIN, 0.005, 2000)  # same end time
        assert not coarse.diverged and not fine.diverged
        assert fine.max_error < coarse.max_error, kf.label


def test_simulate_divergent_polynomial():
    bad = DifferenceFormula(None, (1.0, -2.1, 1.1), -0.1)
    run = simulate(bad, SIN, 0.01, 10000)
    assert run.diverged
    assert run.max_error > 1e9
    # well within the first thousand steps
    assert simulate(bad, SIN, 0.01, 1000).diverged


def test_any_root_beyond_1_05_diverges():
    cases = [
        DifferenceFormula(None, (1.0, -2.1, 1.1), -0.1),     # roots {1, 1.1}
        DifferenceFormula(None, (1.0, 0.0, -1.21), 2.0),     # roots ±1.1
        DifferenceFormula(None, (1.0, -0.05, -1.103), 1.0),  # max root 1.075
    ]
    for f in cases:
        assert max(abs(z) for z in np.roots(f.p)) >= 1.05
        assert simulate(f, SIN, 0.01, 10000).diverged


def test_simulate_euler_exact_on_quadratic():
    a = catalog()[0].to_formula()
    run = simulate(a, monomial(2), 0.1, 50, t0=1.0)
    assert run.max_error < 1e-12


def test_simulate_zero_steps():
    e = catalog()[4].to_formula()
    run = simulate(e, SIN, 0.01, 0)
    assert run.max_error == 0.0
    assert not run.diverged


def test_simulate_argument_validation():
    e = catalog()[4].to_formula()
    with pytest.raises(ValueError):
        simulate(e, SIN, -0.01, 10)
    with pytest.raises(ValueError):
        simulate(e, SIN, 0.01, -1)


def test_simulate_divergence_stops_early():
    # max_error is the error at the detection point, not a later blowup value
    bad = DifferenceFormula(None, (1.0, -2.1, 1.1), -0.1)
    r1 = simulate(bad, SIN, 0.01, 10000)
    r2 = simulate(bad, SIN, 0.01, 400)
    if r2.diverged:
        assert r1.max_error == r2.max_error


# ------------------------------------------------------------ whole catalog


def test_validate_catalog_all_ok():
    results = validate_catalog()
    assert len(results) == 6
    assert all(r["ok"] for r in results)


def test_validate_catalog_corruption_detected():
    results = validate_catalog(corrupt="E")
    by_label = {r["label"]: r for r in results}
    assert not by_label["E"]["ok"]
    assert not by_label["E"]["root_at_1"]
    assert all(by_label[l]["ok"] for l in "ABCDF")
