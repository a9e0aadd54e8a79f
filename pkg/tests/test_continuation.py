import math
from fractions import Fraction as F

import numpy as np
import pytest

from jacbif import (
    ContinuationSettings,
    NoFoldBracketError,
    ParameterError,
    ProblemSpec,
    SpectralFunction,
    bifurcation_points,
    boundary_residual,
    branch_switch,
    continue_branch,
    count_critical_points,
    count_crossings,
    critical_point_list,
    crossing_points,
    detect_fold,
    endpoint_label,
    eval_jacobi,
    find_degenerate,
    jacobian,
    lambda_prime_zero,
    params_from_sphere,
    residual,
)
from jacbif import jacobi_params
from jacbif.continuation import discretization, solve_at_phase
from jacbif.jacobi import gauss_jacobi_rule, jacobi_table

P10 = ProblemSpec(jacobi_params(1, 0), 2.0)
PHALF = ProblemSpec(jacobi_params(F(1, 2), F(1, 2)), 3.0)
PLEG = ProblemSpec(jacobi_params(0, 0), 2.0)


def _mode_state(spec, k, eps):
    c = np.zeros(spec.N)
    c[0] = 1.0
    c[k] = eps
    return SpectralFunction(c, spec.params)


class TestProblemSpec:
    def test_defaults(self):
        spec = ProblemSpec(jacobi_params(1, 0), 2.0)
        assert spec.N == 64 and spec.M == 192

    @pytest.mark.parametrize("q", [1.0, 0.5, -2.0])
    def test_q_must_exceed_one(self, q):
        with pytest.raises(ParameterError):
            ProblemSpec(jacobi_params(1, 0), q)

    def test_quadrature_floor(self):
        with pytest.raises(ParameterError):
            ProblemSpec(jacobi_params(1, 0), 2.0, N=16, M=24)


class TestResidual:
    def test_trivial_state_is_exact_zero(self):
        one = SpectralFunction.constant_one(P10)
        assert np.all(residual(one, 5.0, P10).coeffs == 0.0)

    def test_quadratic_remainder_at_bifurcation_point(self):
        # u = 1 + eps P_k at lambda_k: the linear terms cancel exactly
        lam1 = bifurcation_points(P10, 1)[0][1]
        disc = discretization(P10)
        norms = []
        for eps in (1e-4, 1e-5):
            r = residual(_mode_state(P10, 1, eps), lam1, P10)
            norms.append(disc.w_norm(r.coeffs))
        assert norms[1] < 1e-8
        assert norms[0] / norms[1] == pytest.approx(100.0, rel=0.05)

    def test_lambda_zero_leaves_diagonal_term(self):
        eps = 1e-5
        r = residual(_mode_state(P10, 1, eps), 0.0, P10)
        assert r.coeffs[1] == pytest.approx(-(P10.params.a + 1.0) * eps, rel=1e-12)
        assert np.max(np.abs(np.delete(r.coeffs, 1))) < 1e-16

    def test_nonpositive_state_rejected(self):
        c = np.zeros(P10.N)
        c[0] = 1.0
        c[1] = 2.0  # drives u below zero near t = -1
        with pytest.raises(Exception) as err:
            residual(SpectralFunction(c, P10.params), 1.0, P10)
        assert "nonpositive" in str(err.value).lower() or "min" in str(err.value)


class TestJacobian:
    def test_diagonal_at_trivial_state(self):
        one = SpectralFunction.constant_one(P10)
        lam = 2.0
        mat = jacobian(one, lam, P10)
        i = np.arange(P10.N)
        expected = -i * (i + P10.params.a) - lam * (1.0 - P10.q)
        assert np.diag(mat) == pytest.approx(expected, rel=1e-12)
        off = mat - np.diag(np.diag(mat))
        assert np.max(np.abs(off)) < 1e-10

    def test_mode_k_vanishes_at_lambda_k(self):
        one = SpectralFunction.constant_one(P10)
        for k, lam_k in bifurcation_points(P10, 4):
            mat = jacobian(one, lam_k, P10)
            assert abs(mat[k, k]) < 1e-10

    def test_finite_difference_match(self):
        rng = np.random.default_rng(7)
        disc = discretization(P10)
        c = np.zeros(P10.N)
        c[0] = 1.0
        c[1:] = 0.2 * rng.standard_normal(P10.N - 1) / (1.0 + np.arange(1, P10.N)) ** 3
        v = rng.standard_normal(P10.N) / (1.0 + np.arange(P10.N)) ** 2
        v /= disc.w_norm(v)
        lam = 2.0
        eps = 1e-6
        jv = jacobian(SpectralFunction(c, P10.params), lam, P10) @ v
        fd = (
            disc.residual_coeffs(c + eps * v, lam) - disc.residual_coeffs(c - eps * v, lam)
        ) / (2.0 * eps)
        assert disc.w_norm(fd - jv) < 1e-6

    def test_weighted_symmetry(self):
        # h_i J_ij == h_j J_ji up to roundoff (self-adjointness in the
        # weighted inner product)
        rng = np.random.default_rng(3)
        disc = discretization(PHALF)
        c = np.zeros(PHALF.N)
        c[0] = 1.2
        c[1:] = 0.1 * rng.standard_normal(PHALF.N - 1) / (1.0 + np.arange(1, PHALF.N)) ** 2
        mat = jacobian(SpectralFunction(c, PHALF.params), 1.7, PHALF)
        weighted = disc.h[:, None] * mat
        scale = np.max(np.abs(weighted))
        assert np.max(np.abs(weighted - weighted.T)) < 1e-10 * scale


class TestBifurcationData:
    def test_lambda_k_values(self):
        assert bifurcation_points(PHALF, 2) == [(1, pytest.approx(1.5)), (2, pytest.approx(4.0))]
        assert bifurcation_points(P10, 1)[0][1] == pytest.approx(3.0)

    def test_strictly_increasing(self):
        lams = [lam for _, lam in bifurcation_points(PLEG, 10)]
        assert all(a < b for a, b in zip(lams, lams[1:]))

    def test_slope_closed_form(self):
        assert lambda_prime_zero(1, PLEG) == 0.0
        assert lambda_prime_zero(1, P10) == pytest.approx(-1.2, rel=1e-14)
        assert lambda_prime_zero(2, PLEG) < 0.0
        assert lambda_prime_zero(2, PHALF) < 0.0

    def test_theorem_scope_guard(self):
        swapped = ProblemSpec(jacobi_params(0, 1), 2.0)
        with pytest.raises(ParameterError):
            lambda_prime_zero(1, swapped)
        # raw residual evaluation remains available outside the hypotheses
        one = SpectralFunction.constant_one(swapped)
        assert np.all(residual(one, 2.0, swapped).coeffs == 0.0)


class TestCounting:
    def test_mode_perturbation_crossings(self):
        u = _mode_state(PLEG, 3, 0.01)
        assert count_crossings(u) == 3
        roots = crossing_points(u)
        expected = sorted(
            float(t) for t in np.polynomial.legendre.legroots([0, 0, 0, 1])
        )
        assert roots == pytest.approx(expected, abs=1e-10)

    def test_constant_state_rejected(self):
        with pytest.raises(ParameterError):
            count_crossings(SpectralFunction.constant_one(PLEG))

    def test_critical_points_of_even_mode(self):
        u = _mode_state(PHALF, 2, 0.01)
        assert count_critical_points(u) == 1
        pts = critical_point_list(u)
        t0, kind = pts[0]
        assert t0 == pytest.approx(0.0, abs=1e-10)
        assert kind == "min"  # P_2 dips below its endpoints at the center

    def test_endpoint_labels(self):
        u = _mode_state(PHALF, 2, 0.01)
        assert endpoint_label(u, +1) == "max"
        assert endpoint_label(u, -1) == "max"  # P_2(-1) > 0


class TestBranchSwitch:
    def test_first_point_monotone_case(self):
        bp = branch_switch(1, P10, 1e-3, +1)
        # slope -6/5 against unit-normalized tangent with h_1 = 1
        assert bp.lam == pytest.approx(3.0 - 1.2e-3, rel=1e-4)
        assert bp.crossings == 1
        assert bp.critical_points == 0
        assert bp.residual_norm < 1e-11 * (1.0 + bp.u.w_norm())

    def test_two_mode_case(self):
        bp = branch_switch(2, PHALF, 1e-3, +1)
        assert bp.crossings == 2

    def test_zero_slope_case_is_quadratic(self):
        lam1 = bifurcation_points(PHALF, 1)[0][1]
        for direction in (+1, -1):
            bp = branch_switch(1, PHALF, 1e-3, direction)
            assert abs(bp.lam - lam1) < 1e-4  # O(s0^2), not O(s0)

    def test_tangent_recovery(self):
        # (u - 1)/||u - 1|| approaches the normalized mode direction
        disc = discretization(P10)
        sqh = math.sqrt(disc.h[1])
        devs = []
        for s0 in (1e-2, 1e-3):
            bp = branch_switch(1, P10, s0, +1)
            d = np.array(bp.u.coeffs)
            d[0] -= 1.0
            d /= disc.w_norm(d)
            ref = np.zeros(P10.N)
            ref[1] = 1.0 / sqh
            devs.append(disc.w_norm(d - ref))
        assert devs[0] < 2e-2 and devs[1] < 2e-3

    def test_preconditions(self):
        with pytest.raises(ParameterError):
            branch_switch(1, P10, 0.2, +1)
        with pytest.raises(ParameterError):
            branch_switch(40, P10, 1e-3, +1)
        with pytest.raises(ParameterError):
            branch_switch(1, P10, 1e-3, 2)


class TestContinueBranch:
    def test_descending_branch(self):
        settings = ContinuationSettings(max_steps=25, ds_max=0.02)
        start = branch_switch(1, P10, 1e-3, +1)
        branch = continue_branch(start, P10, settings)
        lams = [p.lam for p in branch.points]
        assert all(a > b for a, b in zip(lams, lams[1:]))
        assert {p.crossings for p in branch.points} == {1}
        ends = np.array([[p.u(-1.0), p.u(1.0)] for p in branch.points])
        assert np.all(ends[:, 0] < 1.0) and np.all(ends[:, 1] > 1.0)

    def test_residuals_and_s_monotone(self):
        settings = ContinuationSettings(max_steps=10, ds_max=0.01)
        start = branch_switch(2, PHALF, 1e-3, +1)
        branch = continue_branch(start, PHALF, settings)
        for p in branch.points:
            assert p.residual_norm < settings.newton_tol * (1.0 + p.u.w_norm())
        s = [p.s for p in branch.points]
        assert all(b > a for a, b in zip(s, s[1:]))

    def test_lambda_window_termination(self):
        settings = ContinuationSettings(max_steps=100, ds_max=0.05, lambda_ceiling=3.05)
        start = branch_switch(1, P10, 1e-3, -1)  # lambda increases this way
        branch = continue_branch(start, P10, settings)
        assert branch.termination == "lambda-window"
        assert branch.points[-1].lam >= 3.05

    def test_amplitude_cap_termination(self):
        # cap below the norm of the trivial state: trips at the first step
        settings = ContinuationSettings(max_steps=200, ds_max=0.01, amplitude_cap=1.0)
        start = branch_switch(1, P10, 1e-3, +1)
        branch = continue_branch(start, P10, settings)
        assert branch.termination == "amplitude-cap"
        assert len(branch.points) == 2
        assert branch.points[-1].u.w_norm() > 1.0

    def test_minus_direction_mirrors_slope(self):
        bp = branch_switch(1, P10, 1e-3, -1)
        assert bp.s == -1e-3
        assert bp.lam == pytest.approx(3.0 + 1.2e-3, rel=1e-4)
        settings = ContinuationSettings(max_steps=5, ds_max=0.005)
        branch = continue_branch(bp, P10, settings)
        assert branch.direction == -1
        s = [p.s for p in branch.points]
        lams = [p.lam for p in branch.points]
        assert all(b < a for a, b in zip(s, s[1:]))
        assert all(b > a for a, b in zip(lams, lams[1:]))

    def test_boundary_residual_small_on_branch(self):
        settings = ContinuationSettings(max_steps=12, ds_max=0.05)
        start = branch_switch(1, P10, 1e-3, +1)
        branch = continue_branch(start, P10, settings)
        p = branch.points[-1]
        bm, bp_ = boundary_residual(p.u, p.lam, P10)
        bound = 1e-6 * (1.0 + p.u.w_norm())
        assert abs(bm) < bound and abs(bp_) < bound


class TestFolds:
    def test_no_bracket_raises(self):
        settings = ContinuationSettings(max_steps=6, ds_max=0.01)
        start = branch_switch(1, P10, 1e-3, +1)
        branch = continue_branch(start, P10, settings)
        with pytest.raises(NoFoldBracketError):
            detect_fold(branch, P10)

    def test_monotone_fold_case(self):
        rec = find_degenerate(1, P10)
        assert rec.moore_spence_residual < 1e-10
        assert rec.point.crossings == 1
        assert rec.point.critical_points == 0
        assert 0.0 < rec.lambda_star < 3.0
        assert rec.lambda_star <= min(p.lam for p in rec.branch.points) + 1e-9
        # kernel direction is a genuine null vector of the Jacobian
        disc = discretization(P10)
        jv = disc.jacobian(rec.point.u.coeffs, rec.lambda_star) @ rec.null_direction.coeffs
        assert disc.w_norm(jv) < 1e-9
        assert rec.null_direction.w_norm() == pytest.approx(1.0, rel=1e-10)

    def test_parity_violation(self):
        with pytest.raises(ParameterError):
            find_degenerate(1, PHALF)
        with pytest.raises(ParameterError):
            find_degenerate(3, PLEG)

    def test_supercritical_exponent_rejected(self):
        sphere = params_from_sphere(3, 1, 0, m_focal=0)  # threshold (3+2)/(3-2) = 5
        spec = ProblemSpec(sphere.params, 6.0)
        with pytest.raises(ParameterError):
            find_degenerate(2, spec, sphere=sphere)


class TestPhaseSolve:
    def test_refinement_moves_lambda_negligibly(self):
        settings = ContinuationSettings(max_steps=8, ds_max=0.02)
        start = branch_switch(1, P10, 1e-3, +1)
        branch = continue_branch(start, P10, settings)
        p = branch.points[-1]
        disc = discretization(P10)
        sigma = float(p.u.coeffs[1]) * math.sqrt(disc.h[1])
        fine = ProblemSpec(P10.params, P10.q, N=2 * P10.N)
        guess = np.zeros(fine.N)
        guess[: P10.N] = p.u.coeffs
        _, lam2 = solve_at_phase(1, fine, sigma, guess=(guess, p.lam * (1 + 1e-6)))
        assert abs(lam2 - p.lam) / p.lam < 1e-8


class TestSpectralFunction:
    def test_evaluation_matches_basis(self):
        c = np.zeros(P10.N)
        c[0], c[3] = 1.0, 0.25
        u = SpectralFunction(c, P10.params)
        t = 0.37
        assert u(t) == pytest.approx(1.0 + 0.25 * eval_jacobi(3, P10.params, t), rel=1e-14)

    def test_w_norm_matches_quadrature(self):
        rng = np.random.default_rng(11)
        c = rng.standard_normal(12)
        u = SpectralFunction(c, P10.params)
        rule = gauss_jacobi_rule(P10.params, 16)
        vals = jacobi_table(P10.params, 11, rule.nodes) @ c
        assert u.w_norm() == pytest.approx(math.sqrt(rule.weights @ vals**2), rel=1e-12)

    def test_coefficients_are_frozen(self):
        u = SpectralFunction.constant_one(P10)
        with pytest.raises(ValueError):
            u.coeffs[0] = 2.0
