from fractions import Fraction as F

import numpy as np
import pytest
from scipy.special import roots_jacobi

from jacbif import (
    ParameterError,
    apply_L,
    endpoint_value,
    eval_jacobi,
    eval_jacobi_deriv,
    exact_coeffs,
    exact_poly,
    gauss_jacobi_rule,
    jacobi_params,
    jacobi_table,
    jacobi_zeros,
    weighted_norm_sq,
)
from jacbif.jacobi import (
    derivative_series,
    integrate_relative,
    norm_sq_closed_form,
    norm_sq_relative,
    rel_weight_moments,
    weight_mass,
    weight_mass_exact,
)

PARAM_GRID = [
    jacobi_params(0, 0),
    jacobi_params(F(1, 2), F(1, 2)),
    jacobi_params(1, 0),
    jacobi_params(F(3, 2), F(1, 2)),
    jacobi_params(F(-2, 5), F(-2, 5)),
    jacobi_params(F(3, 10), F(-7, 10)),
]


class TestParams:
    def test_exact_mirror_for_rational_inputs(self):
        p = jacobi_params(F(3, 2), F(1, 2))
        assert p.exact == (F(3, 2), F(1, 2))
        assert p.a == 3.0 and p.b == 1.0

    def test_float_inputs_have_no_mirror(self):
        assert jacobi_params(0.5, 0.5).exact is None

    @pytest.mark.parametrize("al,be", [(-1, 0), (0, -1), (-1.5, 0.0)])
    def test_nonintegrable_weight_rejected(self, al, be):
        with pytest.raises(ParameterError):
            jacobi_params(al, be)


class TestEvaluation:
    def test_degree_zero_is_one(self):
        assert eval_jacobi(0, jacobi_params(F(3, 2), F(1, 2)), 0.3) == 1.0

    def test_degree_one(self):
        # P_1 = (alpha - beta)/2 + t (alpha + beta + 2)/2
        assert eval_jacobi(1, jacobi_params(1, 0), 1.0) == pytest.approx(2.0, abs=1e-15)

    def test_legendre_p2_at_zero(self):
        assert eval_jacobi(2, jacobi_params(0, 0), 0.0) == pytest.approx(-0.5, abs=1e-15)

    def test_negative_degree_rejected(self):
        with pytest.raises(ParameterError):
            eval_jacobi(-1, jacobi_params(0, 0), 0.0)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_recurrence_matches_exact_coefficients(self, params):
        # two independent routes: stable recurrence vs the operator-eigenvalue
        # construction evaluated in exact rational arithmetic
        pts = [F(j, 50) - 1 for j in range(100)]
        table = jacobi_table(params, 30, np.array([float(t) for t in pts]))
        for k in range(31):
            exact = np.array([float(exact_coeffs(k, params)(t)) for t in pts])
            scale = np.max(np.abs(exact))
            assert np.max(np.abs(table[:, k] - exact)) < 1e-12 * scale

    def test_derivative_matches_exact_derivative(self):
        params = jacobi_params(F(3, 2), F(1, 2))
        dp = exact_coeffs(7, params).deriv()
        for t in (-0.9, -0.25, 0.0, 0.6, 1.0):
            assert eval_jacobi_deriv(7, params, t) == pytest.approx(
                float(dp(F(t).limit_denominator(10**6))), rel=1e-12
            )


class TestEndpoints:
    def test_pochhammer_values(self):
        p10 = jacobi_params(1, 0)
        assert endpoint_value(2, p10, +1) == F(3)
        assert endpoint_value(2, p10, -1) == F(1)
        assert endpoint_value(3, jacobi_params(0, 0), -1) == F(-1)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_matches_recurrence(self, params):
        for k in range(31):
            for side in (-1, +1):
                ref = float(endpoint_value(k, params, side))
                assert eval_jacobi(k, params, float(side)) == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_sign_pattern(self, params):
        for k in range(31):
            assert endpoint_value(k, params, +1) > 0
            assert endpoint_value(k, params, -1) * endpoint_value(k + 1, params, -1) < 0


class TestExactCoefficients:
    def test_known_low_degrees(self):
        assert exact_coeffs(0, jacobi_params(1, 0)).coeffs == (F(1),)
        assert exact_coeffs(1, jacobi_params(1, 0)).coeffs == (F(1, 2), F(3, 2))
        assert exact_coeffs(2, jacobi_params(0, 0)).coeffs == (F(-1, 2), F(0), F(3, 2))

    def test_requires_rational_params(self):
        with pytest.raises(ParameterError):
            exact_coeffs(3, jacobi_params(0.5, 0.5))

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_eigen_identity(self, params):
        # L(P_k) = -k(k + alpha + beta + 1) P_k, exactly
        al, be = params.exact
        for k in range(16):
            p = exact_coeffs(k, params)
            assert apply_L(p, params).coeffs == p.scale(-k * (k + al + be + 1)).coeffs

    def test_parity_for_symmetric_weight(self):
        for params in (jacobi_params(0, 0), jacobi_params(F(1, 2), F(1, 2))):
            for k in range(13):
                coeffs = exact_coeffs(k, params).coeffs
                assert all(c == 0 for i, c in enumerate(coeffs) if (i - k) % 2 == 1)


class TestApplyL:
    def test_linear_image(self):
        out = apply_L(exact_poly([0, 1]), jacobi_params(1, 0))
        assert out.coeffs == (F(-1), F(-3))

    def test_constants_in_kernel(self):
        assert apply_L(exact_poly([1]), jacobi_params(F(1, 2), F(1, 2))).coeffs == ()


class TestMoments:
    def test_legendre_moments(self):
        r = rel_weight_moments(jacobi_params(0, 0), 4)
        assert r == (F(1), F(0), F(1, 3), F(0), F(1, 5))

    def test_one_zero_moments(self):
        # m_0 = 2, m_1 = -2/3, m_2 = 2/3 for the weight (1 - t)
        assert rel_weight_moments(jacobi_params(1, 0), 2) == (F(1), F(-1, 3), F(1, 3))

    def test_exact_mass(self):
        assert weight_mass_exact(jacobi_params(0, 0)) == F(2)
        assert weight_mass_exact(jacobi_params(1, 0)) == F(2)
        assert weight_mass_exact(jacobi_params(F(1, 2), F(1, 2))) is None
        assert weight_mass(jacobi_params(0, 0)) == pytest.approx(2.0, rel=1e-14)
        # half-integer case: mass is pi/2
        assert weight_mass(jacobi_params(F(1, 2), F(1, 2))) == pytest.approx(
            np.pi / 2.0, rel=1e-14
        )


class TestQuadrature:
    def test_midpoint_rule(self):
        rule = gauss_jacobi_rule(jacobi_params(0, 0), 1)
        assert rule.nodes == pytest.approx([0.0], abs=1e-15)
        assert rule.weights == pytest.approx([2.0], rel=1e-15)

    def test_two_point_legendre(self):
        rule = gauss_jacobi_rule(jacobi_params(0, 0), 2)
        assert rule.nodes == pytest.approx([-(3**-0.5), 3**-0.5], rel=1e-14)
        assert rule.weights == pytest.approx([1.0, 1.0], rel=1e-14)

    @pytest.mark.parametrize("m", [1, 4, 9])
    def test_weight_sum_one_zero(self, m):
        rule = gauss_jacobi_rule(jacobi_params(1, 0), m)
        assert rule.weights.sum() == pytest.approx(2.0, rel=1e-13)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    @pytest.mark.parametrize("m", [1, 3, 7, 12])
    def test_moment_exactness(self, params, m):
        rule = gauss_jacobi_rule(params, m)
        m0 = weight_mass(params)
        rel = rel_weight_moments(params, 2 * m - 1)
        for j in range(2 * m):
            approx = float(rule.weights @ rule.nodes**j)
            exact = float(rel[j]) * m0
            assert abs(approx - exact) <= 1e-12 * max(abs(exact), m0)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_against_scipy(self, params):
        rule = gauss_jacobi_rule(params, 12)
        nodes, weights = roots_jacobi(12, params.alpha, params.beta)
        assert rule.nodes == pytest.approx(nodes, abs=1e-13)
        assert rule.weights == pytest.approx(weights, rel=1e-12)

    def test_invalid_order(self):
        with pytest.raises(ParameterError):
            gauss_jacobi_rule(jacobi_params(0, 0), 0)


class TestNorms:
    def test_frozen_values(self):
        assert weighted_norm_sq(0, jacobi_params(0, 0)) == pytest.approx(2.0, rel=1e-14)
        assert weighted_norm_sq(1, jacobi_params(0, 0)) == pytest.approx(2 / 3, rel=1e-13)
        assert weighted_norm_sq(1, jacobi_params(1, 0)) == pytest.approx(1.0, rel=1e-13)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_quadrature_vs_closed_form(self, params):
        for k in range(31):
            assert weighted_norm_sq(k, params) == pytest.approx(
                norm_sq_closed_form(k, params), rel=1e-12
            )

    def test_exact_relative_norm(self):
        # integer parameters: absolute exact value = relative * rational mass
        for params in (jacobi_params(0, 0), jacobi_params(1, 0)):
            mass = weight_mass_exact(params)
            for k in range(9):
                exact = norm_sq_relative(k, params) * mass
                assert weighted_norm_sq(k, params) == pytest.approx(float(exact), rel=1e-12)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_orthogonality(self, params):
        rule = gauss_jacobi_rule(params, 20)
        table = jacobi_table(params, 15, rule.nodes)
        gram = table.T @ (table * rule.weights[:, None])
        h = np.diag(gram)
        off = np.abs(gram - np.diag(h)) / np.sqrt(np.outer(h, h))
        assert np.max(off) < 1e-12


class TestZeros:
    def test_first_degree(self):
        assert jacobi_zeros(1, jacobi_params(1, 0)) == pytest.approx([-1 / 3], abs=1e-14)
        assert jacobi_zeros(1, jacobi_params(F(1, 2), F(1, 2))) == pytest.approx(
            [0.0], abs=1e-15
        )

    def test_legendre_two(self):
        assert jacobi_zeros(2, jacobi_params(0, 0)) == pytest.approx(
            [-(3**-0.5), 3**-0.5], rel=1e-14
        )

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    @pytest.mark.parametrize("k", [5, 13])
    def test_residual_and_ordering(self, params, k):
        roots = jacobi_zeros(k, params)
        assert roots.size == k
        assert np.all(np.diff(roots) > 0)
        assert roots[0] > -1 and roots[-1] < 1
        dense = np.linspace(-1.0, 1.0, 2001)
        scale = np.max(np.abs(jacobi_table(params, k, dense)[:, k]))
        residuals = np.abs(jacobi_table(params, k, roots)[:, k])
        assert np.max(residuals) < 1e-10 * scale


class TestDerivativeSeries:
    def test_matches_exact_derivative(self):
        params = jacobi_params(F(1, 2), F(1, 2))
        coeffs = np.array([0.0, 0.5, -0.25, 0.125, 0.0625])
        sp, dc = derivative_series(params, coeffs)
        t = np.linspace(-0.95, 0.95, 17)
        got = jacobi_table(sp, dc.size - 1, t) @ dc
        expected = sum(
            c * np.array([eval_jacobi_deriv(i, params, float(x)) for x in t])
            for i, c in enumerate(coeffs)
        )
        assert got == pytest.approx(expected, abs=1e-13)


def test_integrate_relative_matches_moment_table():
    params = jacobi_params(F(3, 10), F(-7, 10))
    p = exact_poly([F(1, 3), F(-2), F(0), F(5, 7)])
    r = rel_weight_moments(params, 3)
    assert integrate_relative(p, params) == F(1, 3) * r[0] - 2 * r[1] + F(5, 7) * r[3]
