"""Jacobi polynomials for the weight (1-t)^alpha (1+t)^beta on [-1, 1].

Floating-point evaluation goes through the stable three-term recurrence;
exact monomial coefficients are built independently from the differential
operator L(y) = (1-t^2) y'' + (beta - alpha - (alpha+beta+2) t) y', whose
degree-k eigenpolynomial (eigenvalue -k(k+alpha+beta+1)) is pinned to the
normalization P_k(1) = (alpha+1)_k / k!.  The two routes cross-check each
other throughout the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import NumericalBreakdownError, ParameterError

__all__ = [
    "JacobiParams",
    "jacobi_params",
    "shifted_params",
    "ExactPolynomial",
    "exact_poly",
    "QuadratureRule",
    "jacobi_table",
    "eval_jacobi",
    "eval_jacobi_deriv",
    "endpoint_value",
    "exact_coeffs",
    "apply_L",
    "rel_weight_moments",
    "weight_mass",
    "weight_mass_exact",
    "gauss_jacobi_rule",
    "weighted_norm_sq",
    "norm_sq_closed_form",
    "norm_sq_relative",
    "jacobi_zeros",
    "derivative_series",
]

ExactPair = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class JacobiParams:
    """Weight exponents (alpha, beta), both > -1, with the derived sums
    a = alpha + beta + 1 and b = alpha - beta.

    ``exact`` mirrors (alpha, beta) as rationals when the parameters were
    supplied as int/Fraction; it enables the exact-arithmetic code paths.
    """

    alpha: float
    beta: float
    a: float
    b: float
    exact: ExactPair | None = None

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @property
    def is_symmetric(self) -> bool:
        """True when alpha == beta (Gegenbauer case)."""
        if self.exact is not None:
            return self.exact[0] == self.exact[1]
        return self.alpha == self.beta

    def __repr__(self) -> str:  # keep reprs short in test output
        if self.exact is not None:
            return f"JacobiParams({self.exact[0]}, {self.exact[1]})"
        return f"JacobiParams({self.alpha!r}, {self.beta!r})"


def jacobi_params(alpha, beta) -> JacobiParams:
    """Build JacobiParams; int/Fraction inputs keep an exact rational mirror.

    Floats are accepted but get no exact mirror (pass Fraction("0.3") instead
    of 0.3 when the decimal is meant exactly).
    """
    exact: ExactPair | None = None
    if isinstance(alpha, (int, Fraction)) and isinstance(beta, (int, Fraction)):
        exact = (Fraction(alpha), Fraction(beta))
        if exact[0] <= -1 or exact[1] <= -1:
            raise ParameterError(f"weight not integrable: alpha={alpha}, beta={beta}")
    af, bf = float(alpha), float(beta)
    if not (af > -1.0 and bf > -1.0):
        raise ParameterError(f"weight not integrable: alpha={alpha}, beta={beta}")
    return JacobiParams(af, bf, af + bf + 1.0, af - bf, exact)


def shifted_params(params: JacobiParams, da: int = 1, db: int = 1) -> JacobiParams:
    """Parameters (alpha+da, beta+db), preserving exactness."""
    if params.exact is not None:
        return jacobi_params(params.exact[0] + da, params.exact[1] + db)
    return jacobi_params(params.alpha + da, params.beta + db)


# ---------------------------------------------------------------------------
# floating-point evaluation


def jacobi_table(params: JacobiParams, kmax: int, t) -> np.ndarray:
    """Values of P_0 .. P_kmax at the points t, shape (len(t), kmax+1).

    Three-term recurrence, vectorized over t; stable for all k used here.
    """
    if kmax < 0:
        raise ParameterError("kmax must be >= 0")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    al, be = params.alpha, params.beta
    apb = al + be
    out = np.empty((t.size, kmax + 1))
    out[:, 0] = 1.0
    if kmax >= 1:
        out[:, 1] = 0.5 * (al - be) + 0.5 * (apb + 2.0) * t
    for n in range(2, kmax + 1):
        c1 = 2.0 * n * (n + apb) * (2.0 * n + apb - 2.0)
        c2 = (2.0 * n + apb - 1.0) * (al * al - be * be)
        c3 = (2.0 * n + apb - 2.0) * (2.0 * n + apb - 1.0) * (2.0 * n + apb)
        c4 = 2.0 * (n + al - 1.0) * (n + be - 1.0) * (2.0 * n + apb)
        out[:, n] = ((c2 + c3 * t) * out[:, n - 1] - c4 * out[:, n - 2]) / c1
    return out


def eval_jacobi(k: int, params: JacobiParams, t):
    """P_k at t (scalar or array), normalized so P_k(1) = (alpha+1)_k / k!."""
    if k < 0:
        raise ParameterError("negative degree")
    scalar = np.isscalar(t)
    vals = jacobi_table(params, k, t)[:, k]
    return float(vals[0]) if scalar else vals


def eval_jacobi_deriv(k: int, params: JacobiParams, t):
    """d/dt P_k at t, via the degree/parameter shift identity."""
    if k < 0:
        raise ParameterError("negative degree")
    if k == 0:
        return 0.0 if np.isscalar(t) else np.zeros(np.asarray(t).size)
    factor = 0.5 * (k + params.a)
    shifted = shifted_params(params)
    vals = factor * jacobi_table(shifted, k - 1, t)[:, k - 1]
    return float(vals[0]) if np.isscalar(t) else vals


def endpoint_value(k: int, params: JacobiParams, side: int):
    """Closed-form P_k(side) for side in {-1, +1}.

    P_k(1) = (alpha+1)_k / k!  and  P_k(-1) = (-1)^k (beta+1)_k / k!.
    Returns a Fraction when exact parameters are available, else a float.
    """
    if k < 0:
        raise ParameterError("negative degree")
    if side not in (-1, 1):
        raise ParameterError("side must be -1 or +1")
    if params.exact is not None:
        base = params.exact[0] if side == 1 else params.exact[1]
        val = Fraction(1)
        for j in range(1, k + 1):
            val *= base + j
        val /= math.factorial(k)
        return val if side == 1 else (-1) ** k * val
    base = params.alpha if side == 1 else params.beta
    val = 1.0
    for j in range(1, k + 1):
        val *= (base + j) / j
    return val if side == 1 else (-1.0) ** k * val


# ---------------------------------------------------------------------------
# exact polynomial arithmetic


@dataclass(frozen=True)
class ExactPolynomial:
    """Polynomial with exact rational monomial coefficients.

    ``coeffs[i]`` multiplies t^i; the empty tuple is the zero polynomial.
    """

    coeffs: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t):
        """Horner evaluation; exact for Fraction/int arguments."""
        acc = 0 if not isinstance(t, float) else 0.0
        c = self.coeffs if not isinstance(t, float) else tuple(map(float, self.coeffs))
        for coef in reversed(c):
            acc = acc * t + coef
        return acc

    def deriv(self) -> "ExactPolynomial":
        return exact_poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def shift_up(self, n: int) -> "ExactPolynomial":
        """Multiply by t^n."""
        if not self.coeffs:
            return self
        return exact_poly((Fraction(0),) * n + self.coeffs)

    def scale(self, s) -> "ExactPolynomial":
        return exact_poly([Fraction(s) * c for c in self.coeffs])

    def __add__(self, other: "ExactPolynomial") -> "ExactPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            a[i] += c
        return exact_poly(a)

    def __sub__(self, other: "ExactPolynomial") -> "ExactPolynomial":
        return self + other.scale(-1)

    def __mul__(self, other: "ExactPolynomial") -> "ExactPolynomial":
        if not self.coeffs or not other.coeffs:
            return exact_poly([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, ci in enumerate(self.coeffs):
            if ci:
                for j, cj in enumerate(other.coeffs):
                    out[i + j] += ci * cj
        return exact_poly(out)


def exact_poly(coeffs) -> ExactPolynomial:
    """Normalize a coefficient sequence (trim trailing zeros, Fraction-ify)."""
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return ExactPolynomial(tuple(cs))


def _require_exact(params: JacobiParams) -> ExactPair:
    if params.exact is None:
        raise ParameterError(
            "operation needs rational (alpha, beta); construct the parameters "
            "from int/Fraction values"
        )
    return params.exact


def apply_L(p: ExactPolynomial, params: JacobiParams) -> ExactPolynomial:
    """Exact image of p under L(y) = (1-t^2) y'' + (beta-alpha-(alpha+beta+2)t) y'."""
    al, be = _require_exact(params)
    d1 = p.deriv()
    d2 = d1.deriv()
    term2 = d2 - d2.shift_up(2)
    term1 = d1.scale(be - al) - d1.shift_up(1).scale(al + be + 2)
    return term1 + term2


@lru_cache(maxsize=None)
def exact_coeffs(k: int, params: JacobiParams) -> ExactPolynomial:
    """Exact monomial coefficients of P_k.

    Builds the degree-k eigenpolynomial of L for eigenvalue -k(k+a) by a
    descending coefficient recurrence (each lower-degree correction term is
    uniquely solvable since the eigenvalues j(j+a) are distinct for j <= k),
    then rescales so the value at 1 matches (alpha+1)_k / k!.
    """
    if k < 0:
        raise ParameterError("negative degree")
    al, be = _require_exact(params)
    if k == 0:
        return exact_poly([1])
    a = al + be + 1
    # monic solve: c[k] = 1; for m < k,
    #   (k(k+a) - m(m+a)) c[m] + (m+1)(be-al) c[m+1] + (m+2)(m+1) c[m+2] = 0
    c = [Fraction(0)] * (k + 1)
    c[k] = Fraction(1)
    for m in range(k - 1, -1, -1):
        num = (m + 1) * (be - al) * c[m + 1]
        if m + 2 <= k:
            num += (m + 2) * (m + 1) * c[m + 2]
        c[m] = -num / ((k - m) * (k + m + a))
    value_at_one = sum(c)
    target = endpoint_value(k, params, +1)
    return exact_poly(c).scale(target / value_at_one)


# ---------------------------------------------------------------------------
# weight moments and quadrature


@lru_cache(maxsize=None)
def _rel_weight_moments_cached(params: JacobiParams, jmax: int) -> tuple[Fraction, ...]:
    al, be = _require_exact(params)
    r = [Fraction(1)]
    if jmax >= 1:
        r.append((be - al) / (al + be + 2))
    for j in range(1, jmax):
        r.append(((be - al) * r[j] + j * r[j - 1]) / (j + al + be + 2))
    return tuple(r[: jmax + 1])


def rel_weight_moments(params: JacobiParams, jmax: int) -> tuple[Fraction, ...]:
    """Moments m_j / m_0 of the weight, m_j = int t^j (1-t)^a (1+t)^b dt.

    The ratios are rational for rational (alpha, beta) and follow from
    integrating d/dt [ t^j (1-t)^(alpha+1) (1+t)^(beta+1) ] over [-1, 1].
    """
    return _rel_weight_moments_cached(params, jmax)


def weight_mass(params: JacobiParams) -> float:
    """Total mass m_0 = 2^(alpha+beta+1) B(alpha+1, beta+1)."""
    al, be = params.alpha, params.beta
    return math.exp(
        (al + be + 1.0) * math.log(2.0)
        + math.lgamma(al + 1.0)
        + math.lgamma(be + 1.0)
        - math.lgamma(al + be + 2.0)
    )


def weight_mass_exact(params: JacobiParams) -> Fraction | None:
    """Exact m_0 when it is rational (integer alpha, beta >= 0), else None."""
    if params.exact is None:
        return None
    al, be = params.exact
    if al.denominator != 1 or be.denominator != 1 or al < 0 or be < 0:
        return None
    ai, bi = int(al), int(be)
    return (
        Fraction(2) ** (ai + bi + 1)
        * math.factorial(ai)
        * math.factorial(bi)
        / Fraction(math.factorial(ai + bi + 1))
    )


def integrate_relative(p: ExactPolynomial, params: JacobiParams) -> Fraction:
    """Exact (int p w dt) / m_0 for an exact polynomial p."""
    if not p.coeffs:
        return Fraction(0)
    r = rel_weight_moments(params, p.degree)
    return sum(c * r[i] for i, c in enumerate(p.coeffs))


@dataclass(eq=False)
class QuadratureRule:
    """Gauss rule for the Jacobi weight: exact for degree <= 2*order - 1."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int
    params: JacobiParams

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weights @ values)


@lru_cache(maxsize=None)
def gauss_jacobi_rule(params: JacobiParams, m: int) -> QuadratureRule:
    """m-point Gauss-Jacobi rule by Golub-Welsch.

    Builds the symmetric Jacobi matrix from the monic recurrence coefficients
    and diagonalizes it; nodes are the eigenvalues, weights are m_0 times the
    squared first eigenvector components.
    """
    if m < 1:
        raise ParameterError("rule order must be >= 1")
    al, be = params.alpha, params.beta
    apb = al + be
    diag = np.empty(m)
    diag[0] = (be - al) / (apb + 2.0)
    n = np.arange(1, m, dtype=float)
    if m > 1:
        diag[1:] = (be * be - al * al) / ((2.0 * n + apb) * (2.0 * n + apb + 2.0))
    off = np.empty(max(m - 1, 0))
    if m > 1:
        off[0] = math.sqrt(
            4.0 * (al + 1.0) * (be + 1.0) / ((apb + 2.0) ** 2 * (apb + 3.0))
        )
        n2 = n[1:]
        off[1:] = np.sqrt(
            4.0
            * n2
            * (n2 + al)
            * (n2 + be)
            * (n2 + apb)
            / ((2.0 * n2 + apb) ** 2 * ((2.0 * n2 + apb) ** 2 - 1.0))
        )
    try:
        nodes, vecs = eigh_tridiagonal(diag, off)
    except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
        raise NumericalBreakdownError(f"tridiagonal eigensolve failed: {exc}") from exc
    weights = weight_mass(params) * vecs[0, :] ** 2
    if not (
        np.all(weights > 0.0)
        and np.all(np.diff(nodes) > 0.0)
        and nodes[0] > -1.0
        and nodes[-1] < 1.0
    ):
        raise NumericalBreakdownError("Golub-Welsch produced an invalid rule")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights, m, params)


def weighted_norm_sq(k: int, params: JacobiParams) -> float:
    """h_k = int P_k^2 w dt, computed with a (k+1)-point Gauss rule."""
    if k < 0:
        raise ParameterError("negative degree")
    rule = gauss_jacobi_rule(params, k + 1)
    vals = jacobi_table(params, k, rule.nodes)[:, k]
    return rule.integrate(vals * vals)


def norm_sq_closed_form(k: int, params: JacobiParams) -> float:
    """The standard closed form for h_k, via log-gamma."""
    al, be = params.alpha, params.beta
    return math.exp(
        (al + be + 1.0) * math.log(2.0)
        + math.lgamma(k + al + 1.0)
        + math.lgamma(k + be + 1.0)
        - math.lgamma(k + al + be + 1.0)
        - math.lgamma(k + 1.0)
    ) / (2.0 * k + al + be + 1.0)


def norm_sq_relative(k: int, params: JacobiParams) -> Fraction:
    """Exact h_k / m_0 via the monomial expansion of P_k^2."""
    p = exact_coeffs(k, params)
    return integrate_relative(p * p, params)


def jacobi_zeros(k: int, params: JacobiParams) -> np.ndarray:
    """The k increasing zeros of P_k in (-1, 1): Gauss nodes + one Newton polish."""
    if k < 1:
        raise ParameterError("degree must be >= 1")
    x = np.array(gauss_jacobi_rule(params, k).nodes)
    f = jacobi_table(params, k, x)[:, k]
    fp = eval_jacobi_deriv(k, params, x)
    x -= f / fp
    return x


def derivative_series(params: JacobiParams, coeffs: np.ndarray):
    """Coefficients of d/dt of sum c_i P_i, in the (alpha+1, beta+1) basis.

    d/dt P_i = (i + alpha + beta + 1)/2 * P_{i-1}^{(alpha+1, beta+1)}.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    sp = shifted_params(params)
    if coeffs.size <= 1:
        return sp, np.zeros(1)
    i = np.arange(1, coeffs.size, dtype=float)
    return sp, coeffs[1:] * (i + params.a) / 2.0
