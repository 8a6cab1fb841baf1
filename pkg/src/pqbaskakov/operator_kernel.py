"""Building blocks of the operator: basis weights, integral kernel, argument map.

The three pieces assembled by ``operators``:

* ``baskakov_basis``  -- the nonnegative weights in x (log domain),
* ``durrmeyer_weight`` -- the integral kernel in t (log domain),
* ``stancu_argument`` -- the shifted evaluation argument fed to f.

The kernel is implemented with a t^k factor and upper-triangular p-power
p^(k(k+1)/2). Without the t^k factor the per-index integrals are not
normalized and the operator does not reproduce constants (kept available
via ``literal_kernel=True`` as a diagnostic); with t^k but the lower
triangular power p^(k(k-1)/2) the normalization is off by p^-k, which
only vanishes at p=1. The adopted combination is the unique one for which
[n] times the integral of every weight is exactly 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .pq_core import (
    DEFAULT_TRUNCATION,
    LogValue,
    PqParams,
    TruncationConfig,
    _pq_int,
    pq_exponential_log,
    pq_rising_power,
)

__all__ = [
    "StancuParams",
    "BasisTerm",
    "baskakov_basis",
    "basis_row",
    "durrmeyer_weight",
    "stancu_argument",
]


@dataclass(frozen=True)
class StancuParams:
    """Argument-shift parameters, restricted to 0 <= alpha <= beta."""

    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha <= self.beta):
            raise ValueError(
                f"require 0 <= alpha <= beta, got alpha={self.alpha!r}, "
                f"beta={self.beta!r}")


@dataclass(frozen=True)
class BasisTerm:
    k: int
    log_weight: LogValue


def baskakov_basis(n: int, k: int, x: float, params: PqParams) -> LogValue:
    """Log-domain basis weight b_k(x) of degree index n.

    binomial(n+k-1, k) * p^(k + n(n-1)/2) * q^(k(k-1)/2) * x^k / rising(x, n+k).
    Nonnegative for x >= 0; at x = 0 the k=0 weight is exactly 1 and all
    others vanish.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    if x < 0:
        raise ValueError("x must be >= 0")
    if x == 0.0:
        return LogValue(0.0, 1) if k == 0 else LogValue(float("-inf"), 0)
    p, q = params.p, params.q
    # binomial accumulated in log form: the plain product underflows long
    # before the full weight does (the rising power cancels it back)
    lbin = 0.0
    for i in range(1, k + 1):
        lbin += math.log(_pq_int(n + i - 1, p, q)) - math.log(_pq_int(i, p, q))
    lg = (lbin + (k + n * (n - 1) / 2.0) * math.log(p)
          + (k * (k - 1) / 2.0) * math.log(q) + k * math.log(x)
          - pq_rising_power(x, n + k, params).log_magnitude)
    return LogValue(lg, 1)


def basis_row(n: int, x: float, params: PqParams,
              cfg: TruncationConfig | None = None) -> list[BasisTerm]:
    """Basis weights from k=0 up to the truncation point.

    Truncates at the first k past the peak where three consecutive weights
    drop below series_tol relative to the largest weight seen (the row is
    empirically unimodal in k), capped at cfg.max_k. The retained weights
    sum to 1 within the truncation tolerance (partition of unity).
    """
    from ._family import choose_k_max  # local import avoids a numpy cost at import time

    cfg = cfg or DEFAULT_TRUNCATION
    km = choose_k_max(n, params.p, params.q, x, cfg.series_tol, cfg.max_k)
    return [BasisTerm(k, baskakov_basis(n, k, x, params)) for k in range(km + 1)]


def durrmeyer_weight(n: int, k: int, t: float, params: PqParams,
                     cfg: TruncationConfig | None = None,
                     literal_kernel: bool = False) -> LogValue:
    """Log-domain integral kernel for index k.

    Normalized form: p^(k(k+1)/2) * ([n] t)^k * E(-q [n] t) / [k]!, where E
    is the decaying big exponential. ``literal_kernel=True`` drops the t^k
    factor and uses the lower triangular power p^(k(k-1)/2) * [n]^k; that
    variant is deliberately broken (integrals are no longer normalized) and
    exists only so the breakage can be demonstrated.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    if t < 0:
        raise ValueError("t must be >= 0")
    p, q = params.p, params.q
    nn = _pq_int(n, p, q)
    E = pq_exponential_log(-q * nn * t, params)
    lfact = 0.0
    for m in range(1, k + 1):
        lfact += math.log(_pq_int(m, p, q))
    if literal_kernel:
        lg = (k * (k - 1) / 2.0) * math.log(p) + k * math.log(nn) - lfact
    else:
        if t == 0.0:
            return LogValue(0.0, 1) if k == 0 else LogValue(float("-inf"), 0)
        lg = ((k * (k + 1) / 2.0) * math.log(p) + k * math.log(nn * t) - lfact)
    if E.sign == 0:
        return LogValue(float("-inf"), 0)
    return LogValue(lg + E.log_magnitude, E.sign)


def stancu_argument(n: int, k: int, t: float, params: PqParams,
                    st: StancuParams) -> float:
    """Shifted evaluation argument (p^(k+n-1) q^(1-k) t [n] + alpha)/([n] + beta).

    Affine and nondecreasing in t; alpha = beta = 0 recovers the base
    operator's argument p^(k+n-1) t / q^(k-1).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    p, q = params.p, params.q
    nn = _pq_int(n, p, q)
    scale = math.exp((k + n - 1) * math.log(p) + (1 - k) * math.log(q))
    return (scale * t * nn + st.alpha) / (nn + st.beta)
