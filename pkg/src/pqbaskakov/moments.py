"""Closed-form moments, central moments, and the gamma coefficient family.

These are the oracles the numerical pipeline is validated against. The
monomial moments of the operator have exact rational-in-(p,q) closed forms;
the second central moment is the quadratic gamma1*x^2 + gamma2*x + gamma3,
and gamma_star = max(gamma1, gamma2/2, gamma3) drives every convergence
bound downstream.

The x^2, x and constant coefficients below were derived from the per-index
integral normalization (each kernel integrates to a ratio of deformed
factorials) and the basis summation identities, then pinned numerically
against the full pipeline to ~1e-12 across the whole acceptance grid.
They differ from some commonly printed variants by single powers of p;
the differences matter at p < 1 and are documented in the project notes.
"""
from __future__ import annotations

from dataclasses import dataclass

from .operator_kernel import StancuParams
from .pq_core import PqParams, _pq_int

__all__ = [
    "MomentReport",
    "GammaCoefficients",
    "closed_moment_base",
    "closed_moment_stancu",
    "central_moments",
    "gamma_coefficients",
    "mu_squared",
]


@dataclass(frozen=True)
class MomentReport:
    order: int
    numeric: float
    closed_form: float
    abs_err: float
    rel_err: float

    @classmethod
    def build(cls, order: int, numeric: float, closed_form: float) -> "MomentReport":
        abs_err = abs(numeric - closed_form)
        rel_err = abs_err / max(abs(closed_form), 1e-300)
        return cls(order, numeric, closed_form, abs_err, rel_err)


@dataclass(frozen=True)
class GammaCoefficients:
    gamma1: float
    gamma2: float
    gamma3: float
    gamma_star: float


def _base_coefficients(n: int, p: float, q: float):
    """Coefficients (A, B, C, D) with m1 = x + D, m2 = A x^2 + B x + C."""
    nn = _pq_int(n, p, q)
    two = _pq_int(2, p, q)
    A = _pq_int(n + 1, p, q) / (q * nn)
    B = p ** (n - 3) * two * two / nn
    C = two * q * q * p ** (2 * n - 5) / (nn * nn)
    D = q * p ** (n - 2) / nn
    return nn, A, B, C, D


def closed_moment_base(order: int, n: int, x: float, params: PqParams) -> float:
    """Monomial moments of the unshifted operator.

    order 0: 1
    order 1: x + q p^(n-2) / [n]
    order 2: ([n+1]/(q [n])) x^2 + (p^(n-3) [2]^2 / [n]) x + [2] q^2 p^(2n-5) / [n]^2
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if order == 0:
        return 1.0
    nn, A, B, C, D = _base_coefficients(n, params.p, params.q)
    if order == 1:
        return x + D
    if order == 2:
        return A * x * x + B * x + C
    raise ValueError("order must be 0, 1 or 2")


def closed_moment_stancu(order: int, n: int, x: float, params: PqParams,
                         st: StancuParams) -> float:
    """Monomial moments of the shifted operator; exact reduction to the base
    forms at alpha = beta = 0 (same arithmetic, denominator [n] + 0)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if order == 0:
        return 1.0
    al, be = st.alpha, st.beta
    nn, A, B, C, D = _base_coefficients(n, params.p, params.q)
    N = nn + be
    if order == 1:
        return (nn * x + q_shift(params, n) + al) / N
    if order == 2:
        m1b = x + D
        m2b = A * x * x + B * x + C
        return (nn * nn * m2b + 2.0 * al * nn * m1b + al * al) / (N * N)
    raise ValueError("order must be 0, 1 or 2")


def q_shift(params: PqParams, n: int) -> float:
    """The constant first-moment offset q p^(n-2) of the unshifted operator
    before division by [n]."""
    return params.q * params.p ** (n - 2)


def central_moments(n: int, x: float, params: PqParams,
                    st: StancuParams) -> tuple[float, float]:
    """First and second central moments of the shifted operator.

    first  = (q p^(n-2) + alpha - beta x) / ([n] + beta)
    second = gamma1 x^2 + gamma2 x + gamma3

    The quadratic agrees with m2 - 2 x m1 + x^2 identically (same
    coefficients, different grouping); tests assert the identity to 1e-12.
    """
    g = gamma_coefficients(n, params, st)
    nn = _pq_int(n, params.p, params.q)
    first = (q_shift(params, n) + st.alpha - st.beta * x) / (nn + st.beta)
    second = g.gamma1 * x * x + g.gamma2 * x + g.gamma3
    return first, second


def gamma_coefficients(n: int, params: PqParams,
                       st: StancuParams) -> GammaCoefficients:
    """The quadratic's coefficients and gamma_star = max(g1, g2/2, g3).

    gamma2 can go negative for some parameter ranges; gamma_star uses the
    literal max without clamping. gamma3 is a sum of squares and products
    of nonnegative quantities, hence always >= 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    al, be = st.alpha, st.beta
    nn, A, B, C, D = _base_coefficients(n, params.p, params.q)
    N = nn + be
    E1 = q_shift(params, n) + al
    g1 = nn * nn * A / (N * N) - 2.0 * nn / N + 1.0
    g2 = (nn * nn * B + 2.0 * al * nn) / (N * N) - 2.0 * E1 / N
    g3 = (nn * nn * C + 2.0 * al * nn * D + al * al) / (N * N)
    return GammaCoefficients(g1, g2, g3, max(g1, g2 / 2.0, g3))


def mu_squared(n: int, x: float, params: PqParams, st: StancuParams) -> float:
    """Square of the first central moment; the pointwise bias term in the
    local error bounds. Vanishes exactly where beta x = q p^(n-2) + alpha."""
    first, _ = central_moments(n, x, params, st)
    return first * first
