"""Root finding, the convergence classifier, and the search objective."""

import numpy as np
import pytest

from fdforge.charpoly import (
    DegenerateInputError,
    PENALTY,
    analyze,
    analyze_formula,
    find_roots,
    objective,
    objective_function,
)
from fdforge.taylor_system import Dimensions, seed_to_formula

E_POLY = [1.0, 0.125, -0.75, -0.625, 0.25]


# ----------------------------------------------------------------- raw roots


def test_euler_roots():
    r = find_roots([1, 0, -1])
    assert sorted(np.real(r).tolist()) == pytest.approx([-1.0, 1.0], abs=1e-12)
    assert np.abs(np.imag(r)).max() < 1e-12


def test_double_root():
    r = find_roots([1, -2, 1])
    assert np.allclose(r, [1.0, 1.0], atol=1e-7)


def test_roots_sorted_by_descending_magnitude():
    r = find_roots([1.0, 0.0, 0.0, 0.0, -0.0001])
    mags = np.abs(r)
    assert all(mags[i] >= mags[i + 1] - 1e-15 for i in range(len(r) - 1))


def test_e_poly_magnitudes():
    r = find_roots(E_POLY)
    mags = np.abs(r)
    assert mags[0] == pytest.approx(1.0, abs=1e-10)
    assert mags[1] == pytest.approx(0.9025, abs=5e-4)


@pytest.mark.parametrize("bad", [[], [3.0], [0, 1, 2], [1, np.inf, 0], [1, np.nan]])
def test_degenerate_inputs(bad):
    with pytest.raises(DegenerateInputError):
        find_roots(bad)


def test_backward_stability_residual_bound():
    rng = np.random.default_rng(1234)
    for _ in range(200):
        deg = int(rng.integers(1, 13))
        p = rng.standard_normal(deg + 1)
        if abs(p[0]) < 1e-3:
            p[0] = 1.0
        roots = find_roots(p)
        norm1 = np.abs(p).sum()
        for z in roots:
            val = abs(np.polyval(p, z))
            assert val <= 1e-8 * norm1 * max(1.0, abs(z)) ** deg


def test_root_product_reconstructs_coefficients():
    # multiplying out (x - z_1)...(x - z_d) reproduces p to 1e-6 relative
    rng = np.random.default_rng(77)
    for _ in range(100):
        deg = int(rng.integers(2, 10))
        p = rng.standard_normal(deg + 1)
        p[0] = 1.0
        roots = find_roots(p)
        rebuilt = np.real(np.poly(roots))
        assert np.allclose(rebuilt, p, rtol=1e-6, atol=1e-9)


# ------------------------------------------------------------ classification


def test_euler_is_convergent():
    rep = analyze([1, 0, -1])
    assert rep.convergent
    assert rep.max_magnitude == pytest.approx(1.0, abs=1e-12)
    assert rep.second_magnitude == pytest.approx(1.0, abs=1e-12)
    assert len(rep.on_circle) == 2


def test_known_three_term_formula_convergent():
    assert analyze([2, -3, 2, -1]).convergent


def test_repeated_circle_root_not_convergent():
    rep = analyze([1, -2, 1])
    assert not rep.convergent


def test_root_outside_disk_not_convergent():
    rep = analyze([1.0, -2.1, 1.1])  # roots 1 and 1.1
    assert not rep.convergent
    assert rep.max_magnitude == pytest.approx(1.1, abs=1e-9)
    assert rep.max_deviation == pytest.approx(0.1, abs=1e-9)


def test_e_poly_report_fields():
    rep = analyze(E_POLY)
    assert rep.convergent
    assert abs(rep.max_deviation) <= 1e-8
    assert rep.second_magnitude == pytest.approx(0.9025, abs=5e-4)
    assert len(rep.roots) == 4


def test_second_magnitude_counts_multiplicity():
    # (x - 0.9)^2 (x - 0.1): two largest magnitudes are both 0.9
    p = np.poly([0.9, 0.9, 0.1])
    rep = analyze(p)
    assert rep.second_magnitude == pytest.approx(0.9, abs=1e-9)


def test_degree_one_second_magnitude_is_zero():
    rep = analyze([1.0, -0.5])
    assert rep.second_magnitude == 0.0
    assert rep.convergent


def test_scale_invariance():
    rng = np.random.default_rng(5)
    for _ in range(50):
        p = rng.standard_normal(6)
        p[0] = 1.0
        a = analyze(p)
        b = analyze(3.7 * p)
        assert a.convergent == b.convergent
        assert a.max_magnitude == pytest.approx(b.max_magnitude, abs=1e-12)
        assert a.second_magnitude == pytest.approx(b.second_magnitude, abs=1e-12)


def test_conjugate_circle_pair_is_not_repeated():
    # distinct conjugate roots on the circle are fine (e.g. x^2 + 1)
    rep = analyze([1.0, 0.0, 1.0])
    assert rep.convergent
    assert len(rep.on_circle) == 2


def test_nearby_circle_cluster_rejected():
    # two separate roots on the circle within cluster_tol count as repeated
    z = np.exp(1j * 0.3)
    p = np.real(np.poly([z, z * np.exp(1j * 2e-7), np.conj(z), np.conj(z * np.exp(1j * 2e-7))]))
    rep = analyze(p, circle_tol=1e-6)
    assert not rep.convergent


def test_analyze_formula_object():
    f = seed_to_formula(Dimensions(2, 2), [-5.0, 2.0])
    rep = analyze_formula(f)
    assert rep.convergent
    assert rep.second_magnitude == pytest.approx(0.9025, abs=5e-4)


# -------------------------------------------------------------- search lens


def test_objective_known_convergent_seeds():
    assert objective(Dimensions(2, 2), [-5.0, 2.0]) == pytest.approx(1.0, abs=1e-9)
    assert objective(Dimensions(3, 3), [1.0, 110.0, -40.0]) == pytest.approx(
        1.0, abs=1e-9
    )


def test_objective_penalty_cases():
    d = Dimensions(2, 2)
    f = objective_function(d)
    assert f(np.array([0.0, 0.0])) == PENALTY
    assert f(np.array([np.nan, 1.0])) == PENALTY
    assert f(np.array([1.0, 2.0, 3.0])) == PENALTY
    assert f(np.array([-9.0, 2.0])) == PENALTY  # non-normalizable seed
    g = objective_function(d, penalty=123.0)
    assert g(np.array([0.0, 0.0])) == 123.0


def test_objective_floor_thousand_seeds():
    # p(1) = 0 pins a root at 1: the objective can never dip below 1
    rng = np.random.default_rng(31337)
    dims = [Dimensions(k, s) for k in range(1, 7) for s in (k, k + 1, k + 2)]
    funcs = [objective_function(d) for d in dims]
    count = 0
    while count < 1000:
        for d, f in zip(dims, funcs):
            y = rng.standard_normal(d.s)
            assert f(y) >= 1.0 - 1e-9
            count += 1


def test_objective_matches_full_pipeline():
    # the buffered fast path must agree with the object pipeline
    rng = np.random.default_rng(8)
    for k, s in [(1, 1), (2, 2), (3, 4), (4, 4), (6, 8)]:
        d = Dimensions(k, s)
        f = objective_function(d)
        for _ in range(25):
            y = rng.standard_normal(s)
            v = f(y)
            if v >= PENALTY:
                continue
            rep = analyze_formula(seed_to_formula(d, y))
            assert v == pytest.approx(rep.max_magnitude, abs=1e-10)


def test_objective_scale_invariant():
    d = Dimensions(3, 3)
    f = objective_function(d)
    rng = np.random.default_rng(17)
    for _ in range(20):
        y = rng.standard_normal(3)
        assert f(y) == pytest.approx(f(y * 250.0), abs=1e-9)
