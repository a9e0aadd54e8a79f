"""Expansion of P_k^2 back into the Jacobi family, cube integrals, and the
sign machinery for the expansion coefficients.

The float path projects P_k^2 onto each P_i with Gauss quadrature; the exact
path multiplies monomial expansions and integrates against exact relative
weight moments, so every coefficient is a ratio of rationals with the total
weight mass cancelling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParameterError, StructureViolationError
from .jacobi import (
    JacobiParams,
    exact_coeffs,
    gauss_jacobi_rule,
    integrate_relative,
    jacobi_table,
    norm_sq_closed_form,
    norm_sq_relative,
    weighted_norm_sq,
)

__all__ = [
    "LinearizationTable",
    "linearization_coeffs",
    "cube_integral",
    "cube_integral_relative",
    "SignReport",
    "sign_classification",
    "GasperQuartic",
    "gasper_quartic",
    "QuarticStructure",
    "quartic_sign_structure",
]

ZERO_BAND = 1e-12  # floating coefficients within this relative band count as 0


def _cube_rule_order(k: int) -> int:
    # the cube integrand has degree 3k; order >= ceil((3k+1)/2) + 2 guard points
    return (3 * k + 1 + 1) // 2 + 2


def _projection_rule_order(k: int) -> int:
    # P_k^2 P_i reaches degree 4k at i = 2k; anything shorter would even hit
    # the Gauss nodes of P_i and silently sample the top projection to zero
    return 2 * k + 3


@dataclass(frozen=True)
class LinearizationTable:
    """Coefficients C_k^i of P_k^2 = sum_i C_k^i P_i, i = 0 .. 2k.

    ``exact`` carries the same coefficients as Fractions when (alpha, beta)
    are rational.  ``h_k`` is the squared weighted norm of P_k and ``i3`` the
    cube integral int P_k^3 w dt; orthogonality collapses the latter to
    C_k^k * h_k, which the tests verify.
    """

    k: int
    params: JacobiParams
    coeffs: np.ndarray
    exact: tuple[Fraction, ...] | None
    h_k: float
    i3: float


def linearization_coeffs(k: int, params: JacobiParams) -> LinearizationTable:
    """Project P_k^2 on P_0 .. P_2k: C_k^i = (int P_k^2 P_i w) / h_i."""
    if k < 0:
        raise ParameterError("negative degree")
    rule = gauss_jacobi_rule(params, _projection_rule_order(k))
    table = jacobi_table(params, 2 * k, rule.nodes)
    pk2w = table[:, k] ** 2 * rule.weights
    h = np.array([norm_sq_closed_form(i, params) for i in range(2 * k + 1)])
    coeffs = (pk2w @ table) / h
    exact = None
    if params.is_exact:
        sq = exact_coeffs(k, params) * exact_coeffs(k, params)
        exact = tuple(
            integrate_relative(sq * exact_coeffs(i, params), params)
            / norm_sq_relative(i, params)
            for i in range(2 * k + 1)
        )
    return LinearizationTable(
        k=k,
        params=params,
        coeffs=coeffs,
        exact=exact,
        h_k=weighted_norm_sq(k, params),
        i3=cube_integral(k, params),
    )


def cube_integral(k: int, params: JacobiParams) -> float:
    """int P_k^3 w dt by Gauss quadrature of sufficient order."""
    if k < 0:
        raise ParameterError("negative degree")
    rule = gauss_jacobi_rule(params, _cube_rule_order(k))
    vals = jacobi_table(params, k, rule.nodes)[:, k]
    return rule.integrate(vals**3)


def cube_integral_relative(k: int, params: JacobiParams) -> Fraction:
    """Exact (int P_k^3 w dt) / m_0; rational for rational parameters."""
    p = exact_coeffs(k, params)
    return integrate_relative(p * p * p, params)


@dataclass(frozen=True)
class SignReport:
    """Observed vs expected sign pattern of the expansion coefficients."""

    k: int
    signs: tuple[str, ...]      # each "positive" | "zero" | "negative"
    expected: tuple[str, ...]
    discrepancies: tuple[int, ...]
    exact_path: bool

    @property
    def ok(self) -> bool:
        return not self.discrepancies


def _classify_float(coeffs: np.ndarray) -> tuple[str, ...]:
    band = ZERO_BAND * float(np.max(np.abs(coeffs)))
    out = []
    for c in coeffs:
        if abs(c) <= band:
            out.append("zero")
        else:
            out.append("positive" if c > 0 else "negative")
    return tuple(out)


def sign_classification(k: int, params: JacobiParams) -> SignReport:
    """Classify each C_k^i and compare with the expected pattern.

    Under alpha >= beta and alpha + beta + 1 > 0 the expected pattern is:
    alpha == beta  ->  zero for odd i, positive for even i;
    alpha > beta   ->  positive for every i.
    Violations are reported, not raised.
    """
    if k < 1:
        raise ParameterError("degree must be >= 1")
    if params.exact is not None:
        al, be = params.exact
        if al < be or al + be + 1 <= 0:
            raise ParameterError(
                f"hypothesis violation: need alpha >= beta and alpha+beta+1 > 0, "
                f"got ({al}, {be})"
            )
    elif params.alpha < params.beta or params.a <= 0.0:
        raise ParameterError(
            f"hypothesis violation: need alpha >= beta and alpha+beta+1 > 0, "
            f"got ({params.alpha}, {params.beta})"
        )
    table = linearization_coeffs(k, params)
    if table.exact is not None:
        signs = tuple(
            "zero" if c == 0 else ("positive" if c > 0 else "negative")
            for c in table.exact
        )
    else:
        signs = _classify_float(table.coeffs)
    if params.is_symmetric:
        expected = tuple(
            "zero" if i % 2 == 1 else "positive" for i in range(2 * k + 1)
        )
    else:
        expected = ("positive",) * (2 * k + 1)
    disc = tuple(i for i, (s, e) in enumerate(zip(signs, expected)) if s != e)
    return SignReport(
        k=k,
        signs=signs,
        expected=expected,
        discrepancies=disc,
        exact_path=table.exact is not None,
    )


# ---------------------------------------------------------------------------
# the degree-4 sign polynomial from Gasper's recurrence analysis


@dataclass(frozen=True)
class GasperQuartic:
    """Q(J), the quartic controlling the sign of the middle recurrence
    coefficient; stored both as the factored difference and expanded
    monomial coefficients (ascending, exact when ``a`` is rational)."""

    k: int
    a: float
    coeffs: tuple          # (c0, c1, c2, c3, c4), Fraction or float
    a_exact: Fraction | None

    def factored(self, J):
        """(J+2)^2 (J+2k+2a+1)(2k-J-1)(2J+a+1) - (J+1)^2 (J+2k+2a)(2k-J)(2J+a+3)."""
        k = self.k
        a = self.a_exact if (self.a_exact is not None and not isinstance(J, float)) else self.a
        return (J + 2) ** 2 * (J + 2 * k + 2 * a + 1) * (2 * k - J - 1) * (2 * J + a + 1) - (
            J + 1
        ) ** 2 * (J + 2 * k + 2 * a) * (2 * k - J) * (2 * J + a + 3)

    def expanded(self, J):
        acc = 0 * J
        for c in reversed(self.coeffs):
            acc = acc * J + (float(c) if isinstance(J, float) else c)
        return acc


def gasper_quartic(k: int, a) -> GasperQuartic:
    """Construct Q(J) for fixed k >= 2 and a = alpha + beta + 1 > 0.

    The expanded coefficients are
        c4 = -6,  c3 = -12(a+2),
        c2 = 8k(k+a) - 6a^2 - 38a - 34,
        c1 = 8k(k+a)(a+2) - 14a^2 - 38a - 20,
        c0 = 4(k+3ka+3a+1)(k-1) + 4ak + 4a^2(3k-2).
    k = 1 is excluded: the recurrence boundary equations settle that case
    directly without the quartic.
    """
    if k < 2:
        raise ParameterError("k too small: the quartic analysis needs k >= 2")
    a_exact = Fraction(a) if isinstance(a, (int, Fraction)) else None
    av = a_exact if a_exact is not None else float(a)
    if not float(av) > 0.0:
        raise ParameterError("need a > 0")
    c4 = -6 * (av**0)  # keeps Fraction type when exact
    c3 = -12 * (av + 2)
    c2 = 8 * k * (k + av) - 6 * av**2 - 38 * av - 34
    c1 = 8 * k * (k + av) * (av + 2) - 14 * av**2 - 38 * av - 20
    c0 = 4 * (k + 3 * k * av + 3 * av + 1) * (k - 1) + 4 * av * k + av**2 * (12 * k - 8)
    gq = GasperQuartic(k=k, a=float(av), coeffs=(c0, c1, c2, c3, c4), a_exact=a_exact)
    if not (c3 < 0 and c1 > 0 and c0 > 0):
        raise StructureViolationError(
            f"quartic coefficient signs out of pattern for k={k}, a={a}"
        )
    return gq


@dataclass(frozen=True)
class QuarticStructure:
    """Verified sign structure of Q: one coefficient sign change, Q(0) > 0,
    positive on (0, x0), negative beyond."""

    x0: float
    q_at_zero: float
    coefficient_sign_changes: int


def quartic_sign_structure(gq: GasperQuartic, grid: int = 50) -> tuple[float, QuarticStructure]:
    """Locate the unique positive root x0 by bracketing + bisection and verify
    the sign pattern; raises StructureViolationError on any failed check."""
    q0 = float(gq.expanded(0.0))
    if not q0 > 0.0:
        raise StructureViolationError(f"Q(0) = {q0} is not positive")
    # coefficient sign sequence (descending degree), zeros skipped
    signs = [c for c in (float(x) for x in reversed(gq.coeffs)) if c != 0.0]
    changes = sum(1 for x, y in zip(signs, signs[1:]) if x * y < 0.0)
    if changes != 1:
        raise StructureViolationError(f"{changes} coefficient sign changes, expected 1")
    hi = 1.0
    while gq.expanded(hi) > 0.0:
        hi *= 2.0
        if hi > 2.0**40:
            raise StructureViolationError("no sign change found while bracketing")
    lo = hi / 2.0 if hi > 1.0 else 0.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if gq.expanded(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    x0 = 0.5 * (lo + hi)
    for i in range(1, grid):
        if not gq.expanded(x0 * i / (grid + 1)) > 0.0:
            raise StructureViolationError(f"Q not positive inside (0, x0) at sample {i}")
    span = 4.0 * gq.k
    for i in range(1, grid + 1):
        if not gq.expanded(x0 + span * i / grid) < 0.0:
            raise StructureViolationError(f"Q not negative beyond x0 at sample {i}")
    return x0, QuarticStructure(x0=x0, q_at_zero=q0, coefficient_sign_changes=changes)
