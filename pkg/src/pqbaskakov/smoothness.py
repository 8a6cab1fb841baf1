"""Empirical smoothness moduli, weighted norms, and error-bound reports.

Suprema over [0, infinity) are discretized onto finite grids; the weight
1 + x^2 (and its powers) suppresses the truncated tail for the function
classes these diagnostics are meant for. Bound reports compare an actual
operator error against a modulus-based bound; they are diagnostics, since
the bounds' absolute constants are existential, not computed.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import moments
from .operator_kernel import StancuParams
from .operators import RealFunction, apply_stancu, apply_stancu_grid, _vector_eval
from .pq_core import PqParams, TruncationConfig, _pq_int

__all__ = [
    "GridSpec",
    "BoundReport",
    "DegenerateDeltaWarning",
    "ScanPoint",
    "empirical_modulus",
    "empirical_modulus2",
    "weighted_modulus",
    "weighted_norm",
    "local_error_report",
    "finite_interval_error_report",
    "weighted_convergence_scan",
]


class DegenerateDeltaWarning(UserWarning):
    """delta is below the grid resolution; the modulus degenerates to 0."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform evaluation grid on [x_min, x_max] with the given step."""

    x_min: float
    x_max: float
    step: float

    def __post_init__(self) -> None:
        if self.x_min < 0:
            raise ValueError("x_min must be >= 0")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if (self.x_max - self.x_min) / self.step > 1e7:
            raise ValueError("grid would exceed 1e7 points")

    def points(self) -> np.ndarray:
        count = int(math.floor((self.x_max - self.x_min) / self.step + 1e-9)) + 1
        return self.x_min + self.step * np.arange(count)


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    satisfied: bool
    slack: float

    @classmethod
    def build(cls, lhs: float, rhs: float) -> "BoundReport":
        return cls(lhs, rhs, lhs <= rhs + 1e-9, rhs - lhs)


class ScanPoint(NamedTuple):
    n: int
    sup_weighted_error: float
    delta_n: float


def _callable(f) -> Callable:
    return f.evaluator if isinstance(f, RealFunction) else f


def _shift_count(delta: float, grid: GridSpec) -> int:
    if delta <= 0:
        raise ValueError("delta must be positive")
    h = int(math.floor(delta / grid.step + 1e-9))
    if h < 1:
        warnings.warn(
            f"delta={delta} is below the grid step {grid.step}; returning 0",
            DegenerateDeltaWarning, stacklevel=3)
    return h


def empirical_modulus(f, delta: float, grid: GridSpec) -> float:
    """Discretized first modulus: sup |f(x+h) - f(x)| over grid x and
    h = step, 2*step, ... up to delta. Nondecreasing in delta by
    construction (larger delta only adds shifts)."""
    hmax = _shift_count(delta, grid)
    if hmax < 1:
        return 0.0
    F = _vector_eval(_callable(f), grid.points())
    best = 0.0
    for h in range(1, hmax + 1):
        d = np.abs(F[h:] - F[:-h])
        if d.size:
            best = max(best, float(np.max(d)))
    return best


def empirical_modulus2(f, delta: float, grid: GridSpec) -> float:
    """Discretized second modulus with the kernel f(x+2h) - 2 f(x+h) + f(x);
    vanishes identically on affine functions."""
    hmax = _shift_count(delta, grid)
    if hmax < 1:
        return 0.0
    F = _vector_eval(_callable(f), grid.points())
    best = 0.0
    for h in range(1, hmax + 1):
        if 2 * h >= F.size:
            break
        d = np.abs(F[2 * h:] - 2.0 * F[h:-h] + F[:-2 * h])
        if d.size:
            best = max(best, float(np.max(d)))
    return best


def weighted_modulus(f, delta: float, grid: GridSpec) -> float:
    """Discretized weighted modulus: sup |f(x+h) - f(x)| / (1 + (x+h)^2).

    Satisfies the scaling property Omega(lambda*delta) bounded by
    (1+lambda)*Omega(delta) up to a grid-resolution slack."""
    hmax = _shift_count(delta, grid)
    if hmax < 1:
        return 0.0
    xs = grid.points()
    F = _vector_eval(_callable(f), xs)
    best = 0.0
    for h in range(1, hmax + 1):
        shifted = xs[h:]
        d = np.abs(F[h:] - F[:-h]) / (1.0 + shifted * shifted)
        if d.size:
            best = max(best, float(np.max(d)))
    return best


def weighted_norm(f, grid: GridSpec) -> float:
    """Discretized sup of |f(x)| / (1 + x^2) over the grid."""
    xs = grid.points()
    F = _vector_eval(_callable(f), xs)
    return float(np.max(np.abs(F) / (1.0 + xs * xs)))


def local_error_report(f: RealFunction, n: int, x: float, params: PqParams,
                       st: StancuParams, cfg: TruncationConfig | None,
                       grid: GridSpec, L: float = 4.0) -> BoundReport:
    """Pointwise error against the second-modulus bound.

    lhs = |operator(f; x) - f(x)|, rhs = L * omega2(f; sqrt(gamma_star *
    (1+x)^2 + mu^2)) + omega(f; first-moment offset). L is the caller's
    stand-in for the bound's existential constant (default 4).
    """
    lhs = abs(apply_stancu(f, n, x, params, st, cfg) - f(x))
    g = moments.gamma_coefficients(n, params, st)
    mu2 = moments.mu_squared(n, x, params, st)
    delta = math.sqrt(max(g.gamma_star, 0.0) * (1.0 + x) ** 2 + mu2)
    offset = ((moments.q_shift(params, n) + st.alpha)
              / (_pq_int(n, params.p, params.q) + st.beta))
    rhs = L * empirical_modulus2(f, delta, grid) + empirical_modulus(f, offset, grid)
    return BoundReport.build(lhs, rhs)


def finite_interval_error_report(f: RealFunction, n: int, x: float, a: float,
                                 params: PqParams, st: StancuParams,
                                 cfg: TruncationConfig | None,
                                 grid: GridSpec) -> BoundReport:
    """Error at x in [0, a] against the quadratic-growth-class bound.

    rhs = 4 M (1+a^2) (1+x) sqrt(gamma_star) + 2 omega(f; (1+x) sqrt(gamma_star))
    with the modulus taken on [0, a+1] and M the declared growth constant.
    Requires n > 3.
    """
    if n <= 3:
        raise ValueError("the finite-interval bound requires n > 3")
    if a <= 0:
        raise ValueError("a must be positive")
    lhs = abs(apply_stancu(f, n, x, params, st, cfg) - f(x))
    g = moments.gamma_coefficients(n, params, st)
    root = math.sqrt(max(g.gamma_star, 0.0))
    sub = GridSpec(0.0, a + 1.0, grid.step)
    rhs = (4.0 * f.growth_constant * (1.0 + a * a) * (1.0 + x) * root
           + 2.0 * empirical_modulus(f, (1.0 + x) * root, sub))
    return BoundReport.build(lhs, rhs)


def weighted_convergence_scan(f: RealFunction, n_list: Sequence[int],
                              params_schedule: Callable[[int], PqParams],
                              st: StancuParams,
                              cfg: TruncationConfig | None,
                              grid: GridSpec) -> list[ScanPoint]:
    """Per-n weighted sup errors along a parameter schedule.

    For each n the error is sup over the grid of |operator(f; x) - f(x)|
    divided by (1 + x^2)^(1 + alpha), the weight under which the schedule
    convergence statement is formulated (alpha is the argument-shift
    parameter). Each entry also reports delta_n = sqrt(gamma_star(n)), the
    natural modulus scale at that n. The sequence should be eventually
    decreasing for functions with a finite weighted limit; with p, q held
    fixed it saturates instead.
    """
    xs = grid.points()
    fx = _vector_eval(_callable(f), xs)
    w = (1.0 + xs * xs) ** (1.0 + st.alpha)
    out: list[ScanPoint] = []
    for n in n_list:
        params = params_schedule(n)
        vals = apply_stancu_grid(f, n, xs, params, st, cfg)
        err = float(np.max(np.abs(vals - fx) / w))
        delta_n = math.sqrt(max(moments.gamma_coefficients(n, params, st).gamma_star, 0.0))
        out.append(ScanPoint(int(n), err, delta_n))
    return out
