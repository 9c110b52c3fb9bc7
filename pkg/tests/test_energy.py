import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cosserat_pattern import energy as en
from cosserat_pattern import potential as pot
from cosserat_pattern.field import GridMismatchError, Grid2D, ScalarField
from cosserat_pattern.params import MaterialParams, SlipSystem

P12 = MaterialParams(1.0, 1.0, 12.0)
E1 = SlipSystem((1.0, 0.0), (0.0, 1.0))


def test_ue_identity_cases():
    assert np.allclose(en.assemble_matrices(E1, 0.0, 0.0, 0.0).Ue, np.eye(2))
    assert np.allclose(en.assemble_matrices(E1, 0.0, 0.7, 0.7).Ue, np.eye(2))


def test_ue_quarter_turn_has_zero_symmetric_diagonal():
    U = en.assemble_matrices(E1, math.pi / 2, 0.0, 0.0).Ue
    assert np.allclose(U, en.rotation(-math.pi / 2))
    assert np.allclose(np.diag(en.sym(U)), 0.0)


def test_fp_and_inverse():
    mf = en.assemble_matrices(SlipSystem.rotated(0.3), 0.2, 0.9, 0.1)
    assert np.allclose(mf.Fp @ mf.P, np.eye(2))


def test_stretch_energy_hand_values():
    assert en.stretch_energy_matrix(P12, en.assemble_matrices(E1, 0, 0, 0)) == 0.0
    w = en.stretch_energy_matrix(P12, en.assemble_matrices(E1, 0.0, 0.0, 1.0))
    assert w == pytest.approx((1.0 + 12.0) / 2, rel=1e-14)


@pytest.mark.parametrize("alpha,gamma,beta,g2,expected", [
    (0.0, 0.0, 0.0, 0.0, 0.0),
    (0.0, 0.0, 1.0, 0.0, 6.5),
    (math.pi, 0.0, 0.0, 0.0, 16.0),
])
def test_density_hand_values(alpha, gamma, beta, g2, expected):
    p = MaterialParams(1.0, 1.0, 12.0)
    assert en.density(p, alpha, gamma, beta, g2) == pytest.approx(expected, abs=1e-13)


def test_density_includes_gradient_hardening_and_dissipation():
    p = MaterialParams(1.0, 1.0, 12.0, mu2=0.5, rho=2.0, sigma_y=3.0)
    d = en.density(p, 0.0, -0.5, -0.5, 4.0)
    assert d == pytest.approx(2 * 0.5 * 4.0 + 2.0 * 0.25 + 3.0 * 0.5)


def test_point_state_rejects_negative_gradient():
    with pytest.raises(ValueError):
        en.PointState(0.0, grad_alpha_sq=-1.0)


def test_dual_path_random_frames(rng):
    worst = 0.0
    for _ in range(1000):
        p = MaterialParams(*rng.uniform(0.1, 10.0, 3))
        a, g, b = rng.uniform(0, 2 * math.pi), rng.uniform(-3, 3), rng.uniform(-3, 3)
        w_expanded = en.stretch_part_expanded(p, a, g, b)
        for theta in rng.uniform(0, 2 * math.pi, 2):
            w = en.stretch_energy_matrix(p, en.assemble_matrices(SlipSystem.rotated(theta), a, g, b))
            worst = max(worst, abs(w - w_expanded) / max(1.0, abs(w)))
    assert worst <= 1e-10


def test_reduced_densities_match_potentials(rng):
    # gamma = beta leaves 4 J + const; gamma = 0 leaves 4 J_beta + const
    p = MaterialParams(1.0, 1.0, 6.0)
    alpha = rng.uniform(0, 2 * math.pi, 200)
    for beta in (-2.0, -0.5, 1.3):
        d2 = en.stretch_part_expanded(p, alpha, beta, beta) - 4 * pot.j_value(p, alpha)
        d3 = en.stretch_part_expanded(p, alpha, 0.0, beta) - 4 * pot.jbeta_value(p, beta, alpha)
        assert np.ptp(d2) < 1e-12
        assert np.ptp(d3) < 1e-12


def test_convexity_coeff_examples():
    assert en.gamma_convexity_coeff(P12, 0.0) == pytest.approx(13.0)
    assert en.gamma_convexity_coeff(P12, math.pi / 2) == pytest.approx(3.0)


def test_convexity_second_difference(rng):
    h = 1e-3
    for _ in range(1000):
        p = MaterialParams(*rng.uniform(0.1, 10.0, 3), 1.0, rng.uniform(0, 5), 0.0)
        a, g, b = rng.uniform(0, 2 * math.pi), rng.uniform(-3, 3), rng.uniform(-3, 3)
        d2 = (en.density(p, a, g + h, b) - 2 * en.density(p, a, g, b)
              + en.density(p, a, g - h, b)) / h ** 2
        expected = 2 * p.rho + en.gamma_convexity_coeff(p, a)
        assert d2 > 0
        assert abs(d2 - expected) <= 1e-6 * expected


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 2 * math.pi), st.floats(0.1, 20), st.floats(0.1, 20), st.floats(0.1, 20))
def test_convexity_coeff_positive(alpha, lam, mu, mu_c):
    assert en.gamma_convexity_coeff(MaterialParams(lam, mu, mu_c), alpha) > 0


def test_gamma_min_follows_shear_when_soft():
    assert en.pointwise_gamma_min(P12, 0.0, 0.5) == pytest.approx(0.5)
    assert en.pointwise_gamma_min(P12, math.pi, 0.5) == pytest.approx(0.5)


def test_gamma_min_zero_for_large_yield():
    p = MaterialParams(1.0, 1.0, 12.0, sigma_y=40.0)
    alpha = np.linspace(0, 2 * math.pi, 50)
    assert np.all(en.pointwise_gamma_min(p, alpha, 1.0) == 0.0)


def test_gamma_min_matches_scan(rng):
    gam = np.arange(-100000, 100001) * 1e-4
    for _ in range(30):
        p = MaterialParams(*rng.uniform(0.5, 8.0, 3), 1.0, rng.uniform(0, 2), rng.uniform(0, 3))
        a, b = rng.uniform(0, 2 * math.pi), rng.uniform(-2, 2)
        scan = gam[np.argmin(en.density(p, a, gam, b))]
        assert abs(en.pointwise_gamma_min(p, a, b) - scan) <= 2e-4


def test_curvature_identity_examples(rng):
    assert en.curvature_identity(0.3, (0.0, 0.0)) == (0.0, 0.0)
    lhs, rhs = en.curvature_identity(0.7, (1.0, 0.0))
    assert lhs == pytest.approx(2.0, abs=1e-14) and rhs == 2.0
    for _ in range(1000):
        lhs, rhs = en.curvature_identity(rng.uniform(0, 2 * math.pi), rng.normal(size=2))
        assert abs(lhs - rhs) <= 1e-12


def test_total_energy_constant_fields():
    g = Grid2D(9, 7)
    zero = ScalarField.zeros(g)
    assert en.total_energy(P12, zero, 0.0, 0.0) == 0.0
    assert en.total_energy(P12, zero, 0.0, 1.0) == pytest.approx(6.5, rel=1e-12)
    p = MaterialParams(1.0, 1.0, 12.0, rho=2.0, sigma_y=3.0)
    assert en.total_energy(p, zero, 0.4, 0.4) == pytest.approx(3.0 * 0.4 + 2.0 * 0.16, rel=1e-12)


def test_total_energy_scales_with_area():
    g = Grid2D(9, 9, lx=2.0, ly=3.0)
    assert en.total_energy(P12, ScalarField.zeros(g), 0.0, 1.0) == pytest.approx(6.5 * 6.0)


def test_total_energy_gradient_term_on_a_ramp():
    # alpha = x on the unit square -> 2 mu2 |grad|^2 integrates to 2 mu2 exactly
    g = Grid2D(17, 11)
    f = ScalarField.from_function(g, lambda x, y: 1e-3 * x)
    p = MaterialParams(1.0, 1.0, 12.0, mu2=1.0)
    local = en.total_energy(MaterialParams(1.0, 1.0, 12.0, mu2=1e-300), f, 0.0, 0.0)
    assert en.total_energy(p, f, 0.0, 0.0) - local == pytest.approx(2e-6, rel=1e-9)


def test_total_energy_gamma_field_grid_mismatch():
    with pytest.raises(GridMismatchError):
        en.total_energy(P12, ScalarField.zeros(Grid2D(5, 5)), ScalarField.zeros(Grid2D(6, 5)), 0.0)
