"""Core (p,q)-calculus primitives.

Two-parameter deformations of integers, factorials, binomial coefficients,
rising powers, and the two companion exponential series. Everything that
multiplies triangular powers (p**(n*(n-1)/2) is ~1e-226 at n=100, p=0.9)
has a log-domain representation so downstream kernels never underflow.

All functions are pure; the small internal caches are keyed by value and
never change observable results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

_EPS = math.ulp(1.0)


class NonConvergence(ArithmeticError):
    """A truncated series or node sum did not converge within its budget.

    ``context`` says which tail failed (e.g. ``"series"``, ``"small-node
    tail"``, ``"large-node tail"``) so callers can tell the two directions
    of a bilateral sum apart.
    """

    def __init__(self, message: str, context: str = ""):
        super().__init__(message)
        self.context = context


class KahanSum:
    """Compensated accumulator.

    Keeps the rounding error of long alternating sums at O(eps) instead of
    O(n*eps); mandatory for the alternating exponential series.
    """

    __slots__ = ("total", "_c")

    def __init__(self) -> None:
        self.total = 0.0
        self._c = 0.0

    def add(self, x: float) -> float:
        y = x - self._c
        t = self.total + y
        self._c = (t - self.total) - y
        self.total = t
        return self.total


@dataclass(frozen=True)
class PqParams:
    """Deformation parameters, restricted to the ordered regime 0 < q < p <= 1."""

    p: float
    q: float

    def __post_init__(self) -> None:
        if not (0.0 < self.q < self.p <= 1.0):
            raise ValueError(
                f"require 0 < q < p <= 1, got p={self.p!r}, q={self.q!r}")


@dataclass(frozen=True)
class LogValue:
    """A signed magnitude stored as (log|value|, sign).

    sign == 0 means the value is exactly zero and log_magnitude is unused.
    """

    log_magnitude: float
    sign: int

    @classmethod
    def from_float(cls, v: float) -> "LogValue":
        if v == 0.0:
            return cls(float("-inf"), 0)
        return cls(math.log(abs(v)), 1 if v > 0 else -1)

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.sign == 0 or other.sign == 0:
            return LogValue(float("-inf"), 0)
        return LogValue(self.log_magnitude + other.log_magnitude,
                        self.sign * other.sign)

    def scaled(self, factor: float) -> "LogValue":
        """Multiply by a plain positive float without leaving log domain."""
        if self.sign == 0 or factor == 0.0:
            return LogValue(float("-inf"), 0)
        s = self.sign if factor > 0 else -self.sign
        return LogValue(self.log_magnitude + math.log(abs(factor)), s)


@dataclass(frozen=True)
class TruncationConfig:
    """Budgets and tolerances for every truncated sum in the library.

    Defaults are sized so the operator pipeline at n=100, p=0.9, q=0.8
    resolves moments to better than 1e-6. Schedules with q -> 1 need far
    more integration nodes; raise max_j_pos for those runs.
    """

    series_tol: float = 1e-12
    max_k: int = 2000
    integral_tol: float = 1e-12
    max_j_pos: int = 600
    max_j_neg: int = 600

    def __post_init__(self) -> None:
        if not (self.series_tol > 0 and self.integral_tol > 0):
            raise ValueError("tolerances must be strictly positive")
        if min(self.max_k, self.max_j_pos, self.max_j_neg) < 1:
            raise ValueError("iteration limits must be >= 1")


DEFAULT_TRUNCATION = TruncationConfig()


@lru_cache(maxsize=100_000)
def _pq_int(n: int, p: float, q: float) -> float:
    # sum form: stable also when p and q are close, unlike (p^n - q^n)/(p - q)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 0.0
    return math.fsum(p ** (n - 1 - i) * q ** i for i in range(n))


def pq_int(n: int, params: PqParams) -> float:
    """The (p,q)-deformed integer: sum of p^(n-1-i) q^i over i < n.

    Equals (p^n - q^n)/(p - q); reduces to the classical q-integer at p=1
    and to n as p,q -> 1. Strictly increasing in n.
    """
    return _pq_int(n, params.p, params.q)


@lru_cache(maxsize=100_000)
def _pq_factorial(n: int, p: float, q: float) -> float:
    if n < 0:
        raise ValueError("n must be nonnegative")
    v = 1.0
    for m in range(1, n + 1):
        v *= _pq_int(m, p, q)
    return v


def pq_factorial(n: int, params: PqParams) -> float:
    """Product of the deformed integers 1..n; empty product is 1."""
    return _pq_factorial(n, params.p, params.q)


def pq_binomial(n: int, k: int, params: PqParams) -> float:
    """Deformed binomial coefficient, computed as a product of ratios.

    The ratio form [n-k+i]/[i] keeps intermediate magnitudes near the final
    answer; forming the three factorials first would overflow/underflow for
    large arguments.
    """
    if k < 0 or n < 0:
        raise ValueError("indices must be nonnegative")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    k = min(k, n - k)  # symmetry halves the work
    v = 1.0
    for i in range(1, k + 1):
        v *= _pq_int(n - k + i, params.p, params.q) / _pq_int(i, params.p, params.q)
    return v


def pq_rising_power(x: float, n: int, params: PqParams) -> LogValue:
    """The deformed rising power: product of (p^j + q^j * x) for j < n.

    For x >= 0 every factor is positive, so the sign is always +1 (or the
    value is the empty product 1 at n=0). Each factor is evaluated as
    p^j * (1 + (q/p)^j * x) so it survives j in the thousands.
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    if n < 0:
        raise ValueError("n must be nonnegative")
    p, q = params.p, params.q
    lnp = math.log(p)
    Q = q / p
    lg = 0.0
    Qj = 1.0
    for j in range(n):
        lg += j * lnp + math.log1p(Qj * x)
        Qj *= Q
    return LogValue(lg, 1)


def _big_e_product_log(y: float, p: float, q: float) -> LogValue:
    """log-domain E(-y) for y >= 0 via the descending factor product.

    E(-y) = prod_{i>=0} (1 - (1-Q) Q^i y), Q = q/p. This is the analytic
    continuation of 1/e(y) beyond the radius of the all-positive series and
    is exact on the whole lattice of zeros y = Q^-m/(1-Q). Factors within
    64 ulp of zero are snapped to an exact zero so lattice-aligned node
    sets terminate cleanly.
    """
    if y < 0:
        raise ValueError("product form only used for nonpositive arguments")
    Q = q / p
    one_m = 1.0 - Q
    sign = 1
    lg = 0.0
    z = one_m * y
    while z > 1e-18:
        f = 1.0 - z
        if abs(f) <= 64.0 * _EPS * (1.0 + z):
            return LogValue(float("-inf"), 0)
        if f < 0.0:
            sign = -sign
        lg += math.log(abs(f))
        z *= Q
    lg += -z / one_m  # first-order remainder of the truncated log-product
    return LogValue(lg, sign)


def pq_exponential_log(x: float, params: PqParams) -> LogValue:
    """Log-domain big-E exponential; the workhorse for integral kernels.

    Nonpositive arguments go through the factor product (entire function,
    sign tracked exactly); positive arguments use the series and convert.
    """
    if x <= 0.0:
        return _big_e_product_log(-x, params.p, params.q)
    return LogValue.from_float(pq_exponential(x, "big_E", params))


def pq_exponential(x: float, kind: str, params: PqParams,
                   cfg: TruncationConfig | None = None) -> float:
    """The two companion exponential series.

    ``big_E`` carries q-triangular prefactors, ``small_e`` p-triangular ones;
    they satisfy small_e(x) * big_E(-x) = 1 where both series converge.
    For big_E at negative arguments the series alternates; if cancellation
    eats more than ~1e6 ulp of the partial sums, or the term budget runs
    out, the value is recovered from the factor-product continuation of
    1/small_e instead (identical where both are defined).
    """
    if kind not in ("big_E", "small_e"):
        raise ValueError(f"kind must be 'big_E' or 'small_e', got {kind!r}")
    cfg = cfg or DEFAULT_TRUNCATION
    base = params.q if kind == "big_E" else params.p
    acc = KahanSum()
    acc.add(1.0)
    term = 1.0
    peak = 1.0
    basepow = 1.0  # base^(n-1), kept incrementally
    below = 0
    converged = False
    for n in range(1, cfg.max_k + 1):
        term *= basepow * x / _pq_int(n, params.p, params.q)
        basepow *= base
        acc.add(term)
        peak = max(peak, abs(acc.total))
        if abs(term) < cfg.series_tol * max(abs(acc.total), 1e-300):
            below += 1
            if below >= 3:  # alternating tails can have accidental small terms
                converged = True
                break
        else:
            below = 0
    if not converged:
        if kind == "big_E" and x < 0:
            return _big_e_product_log(-x, params.p, params.q).to_float()
        raise NonConvergence(
            f"exponential series still above tolerance after {cfg.max_k} terms "
            f"(x={x}, kind={kind})", context="series")
    s = acc.total
    if kind == "big_E" and x < 0 and abs(s) < 1e6 * _EPS * peak:
        # the sum is pure cancellation noise; use the product continuation
        return _big_e_product_log(-x, params.p, params.q).to_float()
    return s
