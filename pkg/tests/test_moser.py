import math
import random
from fractions import Fraction

import numpy as np
import pytest

from polydarboux.errors import PreconditionError
from polydarboux.moser import (DeformationField, ball_sample_points,
                               constant_poly_form, integrate_flow,
                               perturbed_multisymplectic, polynomial_map_pullback,
                               pullback_constant_float, verify_darboux)
from polydarboux.polyforms import (PolyForm, constant_spread, exterior_d,
                                   moser_potential, pf_contract_basis, pf_sub,
                                   poly_from_terms)


@pytest.fixture(scope="module")
def fixture():
    return perturbed_multisymplectic(seed=1)


def test_fixture_is_closed_and_block_structured(fixture):
    assert exterior_d(fixture.omega).is_zero()
    assert constant_spread(fixture.omega) == fixture.omega0
    # fiber block isotropy: no monomial carries two fiber differentials
    from polydarboux.polyforms import max_vertical_factors
    assert max_vertical_factors(fixture.omega) == 1


def test_potential_annihilates_fiber_directions(fixture):
    alpha = moser_potential(fixture.omega, fixture.omega0)
    assert exterior_d(alpha) == pf_sub(fixture.omega0, fixture.omega)
    for i in range(4, 7):
        assert pf_contract_basis(alpha, i).is_zero()


def test_field_vanishes_when_nothing_moves(fixture):
    omega0 = fixture.omega0
    alpha = moser_potential(omega0, constant_spread(omega0))
    solver = DeformationField(omega0, omega0, alpha)
    x, dx = solver.field(np.zeros(6), 0.5)
    assert np.allclose(x, 0) and np.allclose(dx, 0)


def test_field_vanishes_at_origin(fixture):
    alpha = moser_potential(fixture.omega, fixture.omega0)
    solver = DeformationField(fixture.omega, fixture.omega0, alpha)
    x, _ = solver.field(np.zeros(6), 0.3)
    assert np.allclose(x, 0)


def test_field_lies_in_fiber_block_and_solves(fixture):
    alpha = moser_potential(fixture.omega, fixture.omega0)
    solver = DeformationField(fixture.omega, fixture.omega0, alpha)
    rng = np.random.default_rng(4)
    for _ in range(5):
        p = rng.uniform(-0.1, 0.1, size=6)
        t = float(rng.uniform(0, 1))
        x, _ = solver.field(p, t)
        assert np.allclose(x[:3], 0)
        # recontract: i_X omega_t(p) must reproduce alpha(p)
        coeffs_t = {m: c.eval_float(p) for m, c in fixture.omega0.coeffs.items()}
        for m, c in pf_sub(fixture.omega, fixture.omega0).coeffs.items():
            coeffs_t[m] = coeffs_t.get(m, 0.0) + t * c.eval_float(p)
        from polydarboux.exterior import removal_sign
        residual = {m: c.eval_float(p) for m, c in alpha.coeffs.items()}
        for m, val in coeffs_t.items():
            for j in range(3, 6):
                bit = 1 << j
                if m & bit and x[j]:
                    key = m ^ bit
                    residual[key] = residual.get(key, 0.0) - removal_sign(m, j) * val * x[j]
        assert max(abs(v) for v in residual.values()) < 1e-10


def test_integrate_zero_field_is_identity():
    def field(p, t, with_jacobian=True):
        return np.zeros(3), (np.zeros((3, 3)) if with_jacobian else None)
    state = integrate_flow(field, np.array([0.5, -0.25, 1.0]), 10)
    assert np.allclose(state.point, [0.5, -0.25, 1.0])
    assert np.allclose(state.jacobian, np.eye(3))


def test_integrate_nilpotent_linear_field_matches_exponential():
    # dp/dt = A p with A strictly upper triangular in the fiber directions
    a = np.array([[0.0, 1.0, 0.5], [0.0, 0.0, 2.0], [0.0, 0.0, 0.0]])

    def field(p, t, with_jacobian=True):
        return a @ p, (a.copy() if with_jacobian else None)

    p0 = np.array([0.3, -0.2, 0.7])
    state = integrate_flow(field, p0, 1000)
    expm = np.eye(3) + a + (a @ a) / 2.0  # nilpotent: the series terminates
    assert np.max(np.abs(state.point - expm @ p0)) < 1e-8
    assert np.max(np.abs(state.jacobian - expm)) < 1e-8


def test_integrate_fourth_order_convergence():
    # scalar flow with oscillating rate; closed form p(1) = p0 * exp(1/2)
    def field(p, t, with_jacobian=True):
        rate = math.sin(2 * math.pi * t) ** 2
        return rate * p, (np.array([[rate]]) if with_jacobian else None)

    p0 = np.array([1.0])
    exact = math.exp(0.5)
    errs = {}
    for steps in (500, 1000):
        state = integrate_flow(field, p0, steps)
        errs[steps] = abs(state.point[0] - exact)
    ratio = errs[500] / errs[1000]
    assert 12 <= ratio <= 20


def test_verify_darboux_on_constant_form(fixture):
    rep = verify_darboux(fixture.omega0, fixture.omega0,
                         ball_sample_points(6, 3, 0.1), steps=10)
    assert rep.max_residual < 1e-12


def test_verify_darboux_small_residual(fixture):
    rep = verify_darboux(fixture.omega, fixture.omega0,
                         ball_sample_points(6, 3, 0.1), steps=100)
    assert rep.max_residual < 1e-6
    assert rep.min_jacobian_det > 0.5


def test_verify_darboux_rejects_non_closed(fixture):
    from polydarboux.polyforms import poly_var
    bad = PolyForm(6, 3, (3, 3), {0b000111: poly_var(6, 4)})
    with pytest.raises(PreconditionError):
        verify_darboux(bad, constant_spread(bad), [np.zeros(6)], steps=2)


def test_intermediate_residuals_shrink_with_steps(fixture):
    # discretization error decreases monotonically and at fourth order
    pts = ball_sample_points(6, 4, 0.1)
    res = {s: verify_darboux(fixture.omega, fixture.omega0, pts, steps=s).max_residual
           for s in (1, 2, 4)}
    assert res[1] > res[2] > res[4]
    assert 12 <= res[1] / res[2] <= 20
    assert 12 <= res[2] / res[4] <= 20


def test_interpolated_form_constant_along_flow(fixture):
    # at each intermediate time the partial pullback reproduces the constant
    # form up to a discretization error that is monotone in the step size
    from polydarboux.moser import intermediate_residual
    pts = ball_sample_points(6, 3, 0.1)
    floor = 5e-14  # below this the measurement is float roundoff
    for t_end in (0.25, 0.5, 0.75):
        res = {s: intermediate_residual(fixture.omega, fixture.omega0, pts, s, t_end)
               for s in (1, 2, 4)}
        assert res[1] < 1e-10
        if res[2] > floor:
            assert res[1] > res[2] and res[1] / res[2] > 8
        if res[4] > floor:
            assert res[2] > res[4]


def test_pullback_constant_float_identity():
    coeffs = {0b011: 2.0, 0b110: -1.0}
    out = pullback_constant_float(coeffs, np.eye(3), 2, 3)
    assert out == coeffs


def test_polynomial_map_pullback_matches_linear_case():
    # a linear chart map reduces to a constant-coefficient pullback
    base = constant_poly_form({0b011: Fraction(1)}, 3, 2, (2, 1))
    chart = [poly_from_terms(3, {(1, 0, 0): 2}),
             poly_from_terms(3, {(0, 1, 0): 1, (1, 0, 0): 1}),
             poly_from_terms(3, {(0, 0, 1): 1})]
    out = polynomial_map_pullback(base, chart)
    assert out == constant_poly_form({0b011: Fraction(2)}, 3, 2, (2, 1))


def test_fixture_seeds_differ():
    fx1 = perturbed_multisymplectic(seed=1)
    fx2 = perturbed_multisymplectic(seed=2)
    assert fx1.omega != fx2.omega
    assert fx1.omega0 == fx2.omega0
