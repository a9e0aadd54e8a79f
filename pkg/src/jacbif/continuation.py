"""Spectral Galerkin discretization of

    (1 - t^2) u'' + (beta - alpha - (alpha+beta+2) t) u' - lambda (u - u^q) = 0

in the Jacobi basis of its own linear part, plus pseudo-arclength branch
tracing and fold localization.

Expanding u = sum c_i P_i makes the linear operator exactly diagonal with
entries -i(i + alpha + beta + 1), so the bifurcation points of the discrete
system coincide with the analytic ones.  The nonlinear term is evaluated
nodally on a Gauss-Jacobi grid and projected back; the singular boundary
conditions are natural for this weak form and are only checked a posteriori
(boundary_residual).

Branch tracing uses a Keller bordered predictor-corrector in the metric
<(dc, dlam), (dc', dlam')> = sum h_i dc_i dc_i' + dlam dlam', and folds are
polished with a Moore-Spence system {F = 0, J v = 0, ||v||_w = 1} whose
regular roots carry a certified kernel direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import (
    NewtonDivergenceError,
    NoFoldBracketError,
    NonpositiveStateError,
    NumericalBreakdownError,
    NumericalError,
    ParameterError,
    StructureViolationError,
    TangencyError,
)
from .geometry import SphereContext, supercritical_threshold
from .jacobi import (
    JacobiParams,
    derivative_series,
    gauss_jacobi_rule,
    jacobi_table,
    norm_sq_closed_form,
    norm_sq_relative,
    weighted_norm_sq,
)
from .linearization import cube_integral, cube_integral_relative

__all__ = [
    "ProblemSpec",
    "SpectralFunction",
    "BranchPoint",
    "Branch",
    "FoldRecord",
    "ContinuationSettings",
    "discretization",
    "residual",
    "boundary_residual",
    "jacobian",
    "bifurcation_points",
    "lambda_prime_zero",
    "solve_at_phase",
    "branch_switch",
    "continue_branch",
    "detect_fold",
    "crossing_points",
    "count_crossings",
    "critical_point_list",
    "count_critical_points",
    "endpoint_label",
    "find_degenerate",
]


def default_quadrature_order(n_modes: int) -> int:
    return max(2 * n_modes + 16, 3 * n_modes)


@dataclass(frozen=True)
class ProblemSpec:
    """Discretization of the interval problem: weight parameters, exponent
    q > 1, number of Jacobi modes N, and quadrature order M >= 2N."""

    params: JacobiParams
    q: float
    N: int = 64
    M: int = 0

    def __post_init__(self):
        if not self.q > 1.0:
            raise ParameterError(f"q={self.q} must be > 1")
        if self.N < 8:
            raise ParameterError(f"N={self.N} must be >= 8")
        object.__setattr__(self, "q", float(self.q))
        if self.M == 0:
            object.__setattr__(self, "M", default_quadrature_order(self.N))
        if self.M < 2 * self.N:
            raise ParameterError(f"M={self.M} must be >= 2N={2 * self.N}")


@lru_cache(maxsize=None)
def _h_vector(params: JacobiParams, n: int) -> np.ndarray:
    h = np.array([norm_sq_closed_form(i, params) for i in range(n)])
    h.setflags(write=False)
    return h


@dataclass(frozen=True)
class SpectralFunction:
    """Function on [-1, 1] stored as coefficients in the Jacobi basis."""

    coeffs: np.ndarray
    params: JacobiParams

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __call__(self, t):
        scalar = np.isscalar(t)
        vals = jacobi_table(self.params, self.coeffs.size - 1, t) @ self.coeffs
        return float(vals[0]) if scalar else vals

    def w_norm(self) -> float:
        """Weighted L2 norm, exact in the coefficients by orthogonality."""
        h = _h_vector(self.params, self.coeffs.size)
        return math.sqrt(float(h @ (self.coeffs * self.coeffs)))

    def derivative_values(self, t) -> np.ndarray:
        sp, dc = derivative_series(self.params, self.coeffs)
        return jacobi_table(sp, dc.size - 1, t) @ dc

    @staticmethod
    def constant_one(spec: "ProblemSpec") -> "SpectralFunction":
        c = np.zeros(spec.N)
        c[0] = 1.0
        return SpectralFunction(c, spec.params)


@dataclass(frozen=True)
class BranchPoint:
    """One accepted continuation state with its diagnostics."""

    u: SpectralFunction
    lam: float
    s: float
    residual_norm: float
    sigma_min: float
    crossings: int
    critical_points: int


@dataclass
class Branch:
    """Ordered accepted points rooted at a bifurcation point."""

    spec: ProblemSpec
    k: int
    direction: int
    points: list[BranchPoint] = field(default_factory=list)
    folds: list["FoldRecord"] = field(default_factory=list)
    termination: str = ""


@dataclass
class FoldRecord:
    """A localized degenerate solution (turning point) with its kernel."""

    point: BranchPoint
    lambda_star: float
    null_direction: SpectralFunction
    moore_spence_residual: float
    branch: Branch | None = None


@dataclass(frozen=True)
class ContinuationSettings:
    ds0: float = 0.01
    ds_min: float = 1e-6
    ds_max: float = 0.05
    newton_tol: float = 1e-11
    max_iter: int = 25
    max_steps: int = 400
    lambda_floor: float = 1e-4
    lambda_ceiling: float = math.inf
    amplitude_cap: float = 1e3
    degenerate_tol: float = 1e-8
    transversality_rel: float = 1e-8
    quad_check_tol: float = 1e-10
    stop_on_fold: bool = False
    fold_trail: int = 3


# ---------------------------------------------------------------------------
# discretization


class Discretization:
    """Precomputed quadrature rule, basis tables and projection operators for
    one ProblemSpec.  Immutable after construction and shared freely."""

    def __init__(self, spec: ProblemSpec):
        self.spec = spec
        p = spec.params
        self.rule = gauss_jacobi_rule(p, spec.M)
        self.rule2 = gauss_jacobi_rule(p, 2 * spec.M)
        self.basis = jacobi_table(p, spec.N - 1, self.rule.nodes)
        self.basis2 = jacobi_table(p, spec.N - 1, self.rule2.nodes)
        self.h = _h_vector(p, spec.N)
        i = np.arange(spec.N, dtype=float)
        self.lin = -i * (i + p.a)
        self.proj = (self.basis * self.rule.weights[:, None]).T / self.h[:, None]
        self.proj2 = (self.basis2 * self.rule2.weights[:, None]).T / self.h[:, None]

    def w_norm(self, c: np.ndarray) -> float:
        return math.sqrt(float(self.h @ (c * c)))

    def values(self, c: np.ndarray) -> np.ndarray:
        return self.basis @ c

    def positive_values(self, c: np.ndarray) -> np.ndarray:
        vals = self.basis @ c
        if vals.min() <= 0.0:
            raise NonpositiveStateError(
                f"state reaches min {vals.min():.3e} at a quadrature node"
            )
        return vals

    def residual_coeffs(self, c: np.ndarray, lam: float) -> np.ndarray:
        vals = self.positive_values(c)
        return self.lin * c - lam * (self.proj @ (vals - vals**self.spec.q))

    def jacobian(self, c: np.ndarray, lam: float) -> np.ndarray:
        vals = self.positive_values(c)
        phi = 1.0 - self.spec.q * vals ** (self.spec.q - 1.0)
        mat = -lam * (self.proj @ (self.basis * phi[:, None]))
        mat[np.diag_indices_from(mat)] += self.lin
        return mat

    def dresidual_dlambda(self, c: np.ndarray) -> np.ndarray:
        vals = self.positive_values(c)
        return -(self.proj @ (vals - vals**self.spec.q))

    def quad_gap(self, c: np.ndarray) -> float:
        """Relative change of the nonlinear projection when M doubles."""
        vals = self.positive_values(c)
        v2 = self.basis2 @ c
        if v2.min() <= 0.0:
            raise NonpositiveStateError("state nonpositive on refined grid")
        p1 = self.proj @ (vals - vals**self.spec.q)
        p2 = self.proj2 @ (v2 - v2**self.spec.q)
        return self.w_norm(p1 - p2) / (1.0 + self.w_norm(p2))


@lru_cache(maxsize=None)
def discretization(spec: ProblemSpec) -> Discretization:
    return Discretization(spec)


# ---------------------------------------------------------------------------
# basic operations


def _as_coeffs(u: SpectralFunction | np.ndarray, spec: ProblemSpec) -> np.ndarray:
    c = u.coeffs if isinstance(u, SpectralFunction) else np.asarray(u, dtype=float)
    if c.size != spec.N:
        raise ParameterError(f"state has {c.size} coefficients, spec wants {spec.N}")
    return c


def residual(u: SpectralFunction, lam: float, spec: ProblemSpec) -> SpectralFunction:
    """Galerkin residual of F(u, lambda), returned as a coefficient vector."""
    disc = discretization(spec)
    return SpectralFunction(disc.residual_coeffs(_as_coeffs(u, spec), lam), spec.params)


def jacobian(u: SpectralFunction, lam: float, spec: ProblemSpec) -> np.ndarray:
    """State Jacobian: diag(-i(i+a)) - lambda * M[1 - q u^(q-1)]."""
    disc = discretization(spec)
    return disc.jacobian(_as_coeffs(u, spec), lam)


def boundary_residual(u: SpectralFunction, lam: float, spec: ProblemSpec) -> tuple[float, float]:
    """Pointwise residuals of the natural boundary relations at -1 and +1:

        (2 beta + 2) u'(-1) - lambda (u(-1) - u(-1)^q)
       -(2 alpha + 2) u'(+1) - lambda (u(+1) - u(+1)^q)

    Small for converged smooth solutions; not imposed by the solver.
    """
    p = spec.params
    ends = np.array([-1.0, 1.0])
    uv = u(ends)
    if uv.min() <= 0.0:
        raise NonpositiveStateError("state nonpositive at an endpoint")
    du = u.derivative_values(ends)
    g = uv - uv**spec.q
    b_minus = (2.0 * p.beta + 2.0) * du[0] - lam * g[0]
    b_plus = -(2.0 * p.alpha + 2.0) * du[1] - lam * g[1]
    return float(b_minus), float(b_plus)


def _require_theorem_scope(spec: ProblemSpec) -> None:
    p = spec.params
    if p.exact is not None:
        ok = p.exact[0] >= p.exact[1] and p.exact[0] + p.exact[1] + 1 > 0
    else:
        ok = p.alpha >= p.beta and p.a > 0.0
    if not ok:
        raise ParameterError(
            "bifurcation-theory operations need alpha >= beta and "
            f"alpha+beta+1 > 0; got ({p.alpha}, {p.beta})"
        )


def bifurcation_points(spec: ProblemSpec, kmax: int) -> list[tuple[int, float]]:
    """(k, lambda_k) with lambda_k = k(k + alpha + beta + 1) / (q - 1)."""
    if kmax < 1:
        raise ParameterError("kmax must be >= 1")
    return [(k, k * (k + spec.params.a) / (spec.q - 1.0)) for k in range(1, kmax + 1)]


def lambda_prime_zero(k: int, spec: ProblemSpec) -> float:
    """Branch slope at the bifurcation point:

        dlambda/ds(0) = -q lambda_k (int P_k^3 w) / (2 int P_k^2 w).

    Zero exactly when alpha == beta and k is odd; negative in the other
    in-scope cases.  Uses the exact integral ratio when parameters are
    rational.
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    _require_theorem_scope(spec)
    lam_k = k * (k + spec.params.a) / (spec.q - 1.0)
    if spec.params.is_exact:
        ratio = cube_integral_relative(k, spec.params) / norm_sq_relative(k, spec.params)
        return -spec.q * lam_k * float(ratio) / 2.0
    return (
        -spec.q
        * lam_k
        * cube_integral(k, spec.params)
        / (2.0 * weighted_norm_sq(k, spec.params))
    )


# ---------------------------------------------------------------------------
# crossing / critical-point counting


def _scan_grid(n_modes: int) -> np.ndarray:
    m = 8 * n_modes
    i = np.arange(m, dtype=float)
    interior = -np.cos(np.pi * (i + 0.5) / m)
    return np.concatenate(([-1.0], interior, [1.0]))


def _bisect(f, lo: float, hi: float, flo: float) -> float:
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    return 0.5 * (lo + hi)


def _grid_roots(grid: np.ndarray, fvals: np.ndarray, f) -> list[float]:
    roots = []
    for j in range(grid.size - 1):
        a, b = fvals[j], fvals[j + 1]
        if a == 0.0:
            if grid[j] > -1.0:
                roots.append(float(grid[j]))
            continue
        if a * b < 0.0:
            roots.append(_bisect(f, float(grid[j]), float(grid[j + 1]), a))
    return roots


def _nonconstant_or_raise(u: SpectralFunction) -> None:
    tail = float(np.max(np.abs(u.coeffs[1:]))) if u.coeffs.size > 1 else 0.0
    if tail <= 1e-13 * (1.0 + abs(float(u.coeffs[0]))):
        raise ParameterError("count is undefined for (numerically) constant states")


def crossing_points(u: SpectralFunction, transversality_rel: float = 1e-8) -> list[float]:
    """Roots of u(t) = 1 in (-1, 1): sign scan on a Chebyshev-distributed grid
    of 8N points, bisection polish, and a transversality check |u'(root)| >
    transversality_rel * ||u'||_inf."""
    _nonconstant_or_raise(u)
    grid = _scan_grid(u.coeffs.size)
    fvals = u(grid) - 1.0
    roots = _grid_roots(grid, fvals, lambda t: u(t) - 1.0)
    sp, dc = derivative_series(u.params, u.coeffs)
    dtable = jacobi_table(sp, dc.size - 1, grid) @ dc
    du_scale = float(np.max(np.abs(dtable)))
    for r in roots:
        slope = float((jacobi_table(sp, dc.size - 1, r) @ dc)[0])
        if abs(slope) <= transversality_rel * du_scale:
            raise TangencyError(
                f"crossing at t={r:.6f} is nearly tangent (|u'|={abs(slope):.2e})"
            )
    return roots


def count_crossings(u: SpectralFunction, transversality_rel: float = 1e-8) -> int:
    return len(crossing_points(u, transversality_rel))


def critical_point_list(
    u: SpectralFunction, transversality_rel: float = 1e-8
) -> list[tuple[float, str]]:
    """Interior roots of u' with labels: 'min' where u < 1, 'max' where u > 1
    (the only possibilities along solution branches)."""
    _nonconstant_or_raise(u)
    sp, dc = derivative_series(u.params, u.coeffs)
    du = SpectralFunction(dc, sp)
    grid = _scan_grid(u.coeffs.size)
    fvals = du(grid)
    roots = _grid_roots(grid, fvals, du)
    sp2, dc2 = derivative_series(sp, dc)
    d2table = jacobi_table(sp2, dc2.size - 1, grid) @ dc2
    d2_scale = float(np.max(np.abs(d2table)))
    out = []
    for r in roots:
        curv = float((jacobi_table(sp2, dc2.size - 1, r) @ dc2)[0])
        if abs(curv) <= transversality_rel * d2_scale:
            raise TangencyError(
                f"critical point at t={r:.6f} is nearly degenerate (|u''|={abs(curv):.2e})"
            )
        out.append((r, "min" if u(r) < 1.0 else "max"))
    return out


def count_critical_points(u: SpectralFunction, transversality_rel: float = 1e-8) -> int:
    return len(critical_point_list(u, transversality_rel))


def endpoint_label(u: SpectralFunction, side: int) -> str:
    """'max' when u(side) > 1 else 'min' (endpoint extremum type along the
    interval, as forced by the natural boundary relations)."""
    return "max" if u(float(side)) > 1.0 else "min"


# ---------------------------------------------------------------------------
# branch construction


def _sigma_min(mat: np.ndarray) -> float:
    return float(np.linalg.svd(mat, compute_uv=False)[-1])


def _make_point(
    c: np.ndarray,
    lam: float,
    s: float,
    spec: ProblemSpec,
    settings: ContinuationSettings,
) -> BranchPoint:
    disc = discretization(spec)
    u = SpectralFunction(c, spec.params)
    rnorm = disc.w_norm(disc.residual_coeffs(c, lam))
    smin = _sigma_min(disc.jacobian(c, lam))
    return BranchPoint(
        u=u,
        lam=float(lam),
        s=float(s),
        residual_norm=rnorm,
        sigma_min=smin,
        crossings=count_crossings(u, settings.transversality_rel),
        critical_points=count_critical_points(u, settings.transversality_rel),
    )


def solve_at_phase(
    k: int,
    spec: ProblemSpec,
    sigma: float,
    guess: tuple[np.ndarray, float] | None = None,
    newton_tol: float = 1e-11,
    max_iter: int = 25,
) -> tuple[np.ndarray, float]:
    """Newton solve of {residual = 0, <u - 1, P_k>_w = sigma * sqrt(h_k)}.

    The phase condition pins c_k = sigma / sqrt(h_k); the remaining
    coefficients and lambda are the unknowns.  Seeded from the tangent
    predictor u = 1 + sigma * P_k / ||P_k||_w unless a guess is supplied.
    """
    disc = discretization(spec)
    sqh = math.sqrt(disc.h[k])
    ck = sigma / sqh
    if guess is not None:
        c = np.array(guess[0], dtype=float)
        lam = float(guess[1])
    else:
        c = np.zeros(spec.N)
        c[0] = 1.0
        lam = k * (k + spec.params.a) / (spec.q - 1.0) + sigma * lambda_prime_zero(
            k, spec
        ) / sqh
    c[k] = ck
    free = np.arange(spec.N) != k
    for _ in range(max_iter):
        r = disc.residual_coeffs(c, lam)
        if disc.w_norm(r) < newton_tol * (1.0 + disc.w_norm(c)):
            return c, lam
        jac = disc.jacobian(c, lam)
        a_mat = np.empty((spec.N, spec.N))
        a_mat[:, :-1] = jac[:, free]
        a_mat[:, -1] = disc.dresidual_dlambda(c)
        delta = np.linalg.solve(a_mat, -r)
        c[free] += delta[:-1]
        lam += delta[-1]
    raise NewtonDivergenceError(
        f"phase-condition Newton did not converge (k={k}, sigma={sigma:.3e})"
    )


def branch_switch(
    k: int,
    spec: ProblemSpec,
    s0: float,
    direction: int,
    settings: ContinuationSettings | None = None,
) -> BranchPoint:
    """First nontrivial point on the branch through (1, lambda_k), at signed
    tangent amplitude sigma = direction * s0."""
    _require_theorem_scope(spec)
    if direction not in (-1, 1):
        raise ParameterError("direction must be +1 or -1")
    if not 0.0 < s0 <= 0.05:
        raise ParameterError("s0 must lie in (0, 0.05]")
    if not 1 <= k <= spec.N // 2:
        raise ParameterError(f"k={k} must lie in [1, N/2] = [1, {spec.N // 2}]")
    settings = settings or ContinuationSettings()
    sigma = direction * s0
    c, lam = solve_at_phase(
        k, spec, sigma, newton_tol=settings.newton_tol, max_iter=settings.max_iter
    )
    bp = _make_point(c, lam, sigma, spec, settings)
    if bp.crossings != k:
        raise StructureViolationError(
            f"first branch point has {bp.crossings} crossings, expected {k}; "
            "increase N or decrease s0"
        )
    return bp


def _tangent(
    disc: Discretization,
    c: np.ndarray,
    lam: float,
    guess_c: np.ndarray,
    guess_lam: float,
) -> tuple[np.ndarray, float]:
    """Unit tangent of the solution curve at (c, lambda), oriented along the
    guess direction; computed from a bordered solve so it stays well-defined
    at folds."""
    n = c.size
    a_mat = np.empty((n + 1, n + 1))
    a_mat[:n, :n] = disc.jacobian(c, lam)
    a_mat[:n, n] = disc.dresidual_dlambda(c)
    a_mat[n, :n] = disc.h * guess_c
    a_mat[n, n] = guess_lam
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    sol = np.linalg.solve(a_mat, rhs)
    tc, tl = sol[:n], sol[n]
    nrm = math.sqrt(float(disc.h @ (tc * tc)) + tl * tl)
    tc, tl = tc / nrm, tl / nrm
    if float(disc.h @ (tc * guess_c)) + tl * guess_lam < 0.0:
        tc, tl = -tc, -tl
    return tc, tl


def _fold_bracketed(lams: list[float]) -> bool:
    for j in range(1, len(lams) - 1):
        if (lams[j + 1] - lams[j]) * (lams[j] - lams[j - 1]) < 0.0:
            return True
    return False


def continue_branch(
    start: BranchPoint,
    spec: ProblemSpec,
    settings: ContinuationSettings | None = None,
) -> Branch:
    """Pseudo-arclength predictor-corrector from an already-converged point.

    Each accepted point is Newton-converged for the bordered system
    {F(c, lambda) = 0, <x - x_prev, tau>_metric = ds} and carries the full
    diagnostic set.  Terminates on step budget, lambda leaving
    (lambda_floor, lambda_ceiling), amplitude cap, or (optionally) a few
    steps after a fold is bracketed.
    """
    settings = settings or ContinuationSettings()
    disc = discretization(spec)
    n = spec.N
    k = start.crossings
    direction = 1 if start.s >= 0.0 else -1
    branch = Branch(spec=spec, k=k, direction=direction, points=[start])

    c = np.array(start.u.coeffs, dtype=float)
    lam = start.lam
    sqh = math.sqrt(disc.h[k])
    guess_c = np.zeros(n)
    guess_c[k] = direction / sqh
    guess_lam = direction * lambda_prime_zero(k, spec) / sqh
    tau_c, tau_lam = _tangent(disc, c, lam, guess_c, guess_lam)

    s_abs = abs(start.s)
    ds = min(max(settings.ds0, settings.ds_min), settings.ds_max)
    steps_after_bracket = 0
    bracketed = False

    while len(branch.points) < settings.max_steps:
        accepted = None
        while True:
            try:
                accepted = _correct(
                    disc, c, lam, tau_c, tau_lam, ds, settings
                )
                break
            except (NewtonDivergenceError, NonpositiveStateError, np.linalg.LinAlgError):
                ds *= 0.5
                if ds < settings.ds_min:
                    raise NewtonDivergenceError(
                        f"corrector failed below ds_min at s={s_abs:.4f}, "
                        f"lambda={lam:.6f}"
                    ) from None
        c_new, lam_new, iters = accepted
        gap = disc.quad_gap(c_new)
        if gap > settings.quad_check_tol:
            raise NumericalBreakdownError(
                f"quadrature convergence check failed (gap={gap:.2e}); increase M"
            )
        s_abs += ds
        point = _make_point(c_new, lam_new, direction * s_abs, spec, settings)
        branch.points.append(point)
        c, lam = c_new, lam_new
        tau_c, tau_lam = _tangent(disc, c, lam, tau_c, tau_lam)

        if not (settings.lambda_floor < lam < settings.lambda_ceiling):
            branch.termination = "lambda-window"
            return branch
        if point.u.w_norm() > settings.amplitude_cap:
            branch.termination = "amplitude-cap"
            return branch
        if settings.stop_on_fold:
            if not bracketed and _fold_bracketed([p.lam for p in branch.points]):
                bracketed = True
            if bracketed:
                steps_after_bracket += 1
                if steps_after_bracket > settings.fold_trail:
                    branch.termination = "fold-bracketed"
                    return branch
        if iters <= 4:
            ds = min(ds * 1.4, settings.ds_max)
        elif iters >= 10:
            ds = max(ds * 0.6, settings.ds_min)
    branch.termination = "max-steps"
    return branch


def _correct(
    disc: Discretization,
    c_prev: np.ndarray,
    lam_prev: float,
    tau_c: np.ndarray,
    tau_lam: float,
    ds: float,
    settings: ContinuationSettings,
) -> tuple[np.ndarray, float, int]:
    """One predictor step + bordered Newton corrector."""
    n = c_prev.size
    c = c_prev + ds * tau_c
    lam = lam_prev + ds * tau_lam
    border = disc.h * tau_c
    a_mat = np.empty((n + 1, n + 1))
    rhs = np.empty(n + 1)
    for it in range(1, settings.max_iter + 1):
        r = disc.residual_coeffs(c, lam)
        arc = float(disc.h @ ((c - c_prev) * tau_c)) + (lam - lam_prev) * tau_lam - ds
        if (
            disc.w_norm(r) < settings.newton_tol * (1.0 + disc.w_norm(c))
            and abs(arc) < settings.newton_tol * (1.0 + ds)
        ):
            return c, lam, it
        a_mat[:n, :n] = disc.jacobian(c, lam)
        a_mat[:n, n] = disc.dresidual_dlambda(c)
        a_mat[n, :n] = border
        a_mat[n, n] = tau_lam
        rhs[:n] = -r
        rhs[n] = -arc
        delta = np.linalg.solve(a_mat, rhs)
        c = c + delta[:n]
        lam = lam + delta[n]
    raise NewtonDivergenceError("bordered corrector exhausted its iterations")


# ---------------------------------------------------------------------------
# fold localization


def detect_fold(
    branch: Branch,
    spec: ProblemSpec,
    settings: ContinuationSettings | None = None,
) -> FoldRecord:
    """Localize a turning point bracketed by the branch.

    Solves the Moore-Spence system {F(c, lambda) = 0, J(c, lambda) v = 0,
    ||v||_w^2 = 1} by Newton, seeded from the lambda-extremal accepted point
    and the smallest-singular-value direction of its Jacobian.
    """
    settings = settings or ContinuationSettings()
    disc = discretization(spec)
    n = spec.N
    lams = [p.lam for p in branch.points]
    seed_idx = None
    for j in range(1, len(lams) - 1):
        if (lams[j + 1] - lams[j]) * (lams[j] - lams[j - 1]) < 0.0:
            seed_idx = j
            break
    if seed_idx is None:
        raise NoFoldBracketError("no sign change in the discrete dlambda/ds sequence")
    seed = branch.points[seed_idx]
    c = np.array(seed.u.coeffs, dtype=float)
    lam = seed.lam
    jac = disc.jacobian(c, lam)
    v = np.linalg.svd(jac)[2][-1]
    v = v / math.sqrt(float(disc.h @ (v * v)))

    q = spec.q
    big = np.zeros((2 * n + 1, 2 * n + 1))
    rhs = np.empty(2 * n + 1)
    ms_res = math.inf
    for _ in range(40):
        vals = disc.positive_values(c)
        v_vals = disc.basis @ v
        jac = disc.jacobian(c, lam)
        r = disc.residual_coeffs(c, lam)
        jv = jac @ v
        norm_def = float(disc.h @ (v * v)) - 1.0
        ms_res = math.sqrt(
            disc.w_norm(r) ** 2 + disc.w_norm(jv) ** 2 + norm_def**2
        )
        if ms_res < 1e-12 * (1.0 + disc.w_norm(c)):
            break
        flam = disc.dresidual_dlambda(c)
        phi = 1.0 - q * vals ** (q - 1.0)
        hess = (
            lam
            * q
            * (q - 1.0)
            * (disc.proj @ (disc.basis * (vals ** (q - 2.0) * v_vals)[:, None]))
        )
        jlam_v = -(disc.proj @ (phi * v_vals))
        big[:n, :n] = jac
        big[:n, n] = flam
        big[:n, n + 1 :] = 0.0
        big[n : 2 * n, :n] = hess
        big[n : 2 * n, n] = jlam_v
        big[n : 2 * n, n + 1 :] = jac
        big[2 * n, :n] = 0.0
        big[2 * n, n] = 0.0
        big[2 * n, n + 1 :] = 2.0 * disc.h * v
        rhs[:n] = -r
        rhs[n : 2 * n] = -jv
        rhs[2 * n] = -norm_def
        delta = np.linalg.solve(big, rhs)
        c = c + delta[:n]
        lam = lam + delta[n]
        v = v + delta[n + 1 :]
    if not ms_res < 1e-10:
        raise NewtonDivergenceError(
            f"Moore-Spence iteration stalled at residual {ms_res:.2e}"
        )
    svals = np.linalg.svd(disc.jacobian(c, lam), compute_uv=False)
    if not svals[-1] < settings.degenerate_tol * svals[0]:
        raise NumericalError(
            f"fold candidate is not degenerate: sigma_min/sigma_max = "
            f"{svals[-1] / svals[0]:.2e}"
        )
    # deterministic sign: largest weighted component positive
    idx = int(np.argmax(np.abs(v) * np.sqrt(disc.h)))
    if v[idx] < 0.0:
        v = -v
    point = _make_point(c, lam, seed.s, spec, settings)
    return FoldRecord(
        point=point,
        lambda_star=float(lam),
        null_direction=SpectralFunction(v, spec.params),
        moore_spence_residual=float(ms_res),
    )


# ---------------------------------------------------------------------------
# top-level composition


def _alternating(labels: list[str]) -> bool:
    return all(a != b for a, b in zip(labels, labels[1:]))


def find_degenerate(
    k: int,
    spec: ProblemSpec,
    sphere: SphereContext | None = None,
    settings: ContinuationSettings | None = None,
    s0: float = 1e-3,
) -> FoldRecord:
    """Trace the branch rooted at (1, lambda_k) in the direction of
    decreasing lambda until a fold is bracketed, then localize it.

    For alpha == beta the branch slope vanishes for odd k and the descent
    direction is undetermined, so odd k is rejected in that case.  When a
    sphere context with a focal dimension is supplied, q must stay below the
    supercriticality threshold.
    """
    _require_theorem_scope(spec)
    if k < 1:
        raise ParameterError("k must be >= 1")
    if spec.params.is_symmetric and k % 2 == 1:
        raise ParameterError(
            "parity violation: for alpha == beta the slope vanishes for odd k "
            "and no descent direction is available"
        )
    if sphere is not None and sphere.m_focal is not None:
        qf = supercritical_threshold(sphere.n, sphere.m_focal)
        if not spec.q < qf:
            raise ParameterError(f"q={spec.q} is not below the threshold q_f={qf}")
    slope = lambda_prime_zero(k, spec)
    if not slope < 0.0:
        raise StructureViolationError(
            f"expected a negative branch slope, got {slope:.3e}"
        )
    if settings is None:
        settings = ContinuationSettings(stop_on_fold=True, max_steps=3000)
    elif not settings.stop_on_fold:
        settings = replace(settings, stop_on_fold=True)
    start = branch_switch(k, spec, s0, +1, settings)
    branch = continue_branch(start, spec, settings)
    record = detect_fold(branch, spec, settings)
    record.branch = branch
    branch.folds.append(record)

    lam_k = k * (k + spec.params.a) / (spec.q - 1.0)
    point = record.point
    if point.crossings != k or point.critical_points != k - 1:
        raise NumericalError(
            f"fold has crossings={point.crossings}, critical={point.critical_points}; "
            f"expected ({k}, {k - 1}); increase N"
        )
    if not 0.0 < record.lambda_star < lam_k:
        raise NumericalError(
            f"fold lambda_star={record.lambda_star:.6f} outside (0, {lam_k:.6f})"
        )
    interior = critical_point_list(point.u, settings.transversality_rel)
    labels = (
        [endpoint_label(point.u, -1)]
        + [kind for _, kind in sorted(interior)]
        + [endpoint_label(point.u, +1)]
    )
    if not _alternating(labels):
        raise StructureViolationError(f"extremum labels do not alternate: {labels}")
    return record
