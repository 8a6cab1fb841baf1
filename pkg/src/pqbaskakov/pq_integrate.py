"""Jackson-type (p,q)-integration on [0, a] and on [0, infinity).

Both integrals are geometric node sums. The finite one runs nodes
a * q^j / p^(j+1) downward from a/p. The improper one is bilateral: the
same lattice extended to j < 0, truncated independently in each direction.

The bilateral node set admits a one-parameter rescaling freedom (any
lattice {A * (q/p)^j} is a valid discretization; the value depends on A
only through an oscillation far below double precision for smooth decaying
integrands). ``node_scale`` exposes that freedom: the default A = 1/p
matches the finite integral's lattice, while the operator pipeline passes
the scale that aligns the lattice with the zero set of the decaying
exponential kernel, which makes the outward tail terminate identically.
"""
from __future__ import annotations

import math
from typing import Callable

from .pq_core import (
    DEFAULT_TRUNCATION,
    KahanSum,
    LogValue,
    NonConvergence,
    PqParams,
    TruncationConfig,
)

__all__ = [
    "TruncationConfig",
    "DEFAULT_TRUNCATION",
    "NonConvergence",
    "jackson_finite",
    "jackson_improper",
]


def _term_value(fval, jacobian: float) -> float:
    # integrands may hand back LogValue when their dynamic range demands it
    if isinstance(fval, LogValue):
        return fval.scaled(jacobian).to_float()
    return jacobian * float(fval)


def jackson_finite(f: Callable[[float], float], a: float, params: PqParams,
                   cfg: TruncationConfig | None = None) -> float:
    """Geometric-node integral of f over [0, a].

    Nodes are a*q^j/p^(j+1); note the j=0 node a/p slightly exceeds a, so f
    must be evaluable a bit past the right endpoint. Satisfies the monomial
    law: integral of t^m equals a^(m+1)/[m+1].
    """
    if a <= 0:
        raise ValueError("a must be positive")
    cfg = cfg or DEFAULT_TRUNCATION
    p, q = params.p, params.q
    Q = q / p
    acc = KahanSum()
    node = a / p
    below = 0
    for _ in range(cfg.max_j_pos):
        term = _term_value(f(node), (p - q) * node)
        acc.add(term)
        if abs(term) <= cfg.integral_tol * max(abs(acc.total), 1e-300):
            below += 1
            if below >= 3:
                return acc.total
        else:
            below = 0
        node *= Q
    raise NonConvergence(
        f"finite integral tail still above tolerance after {cfg.max_j_pos} nodes",
        context="small-node tail")


def jackson_improper(f: Callable[[float], float], params: PqParams,
                     cfg: TruncationConfig | None = None,
                     node_scale: float | None = None) -> float:
    """Bilateral geometric-node integral of f over [0, infinity).

    The inward direction (nodes -> 0) and outward direction (nodes -> inf)
    are truncated independently; each stops after 3 consecutive terms below
    integral_tol relative to the running sum, and each reports its own
    NonConvergence. Integrands must decay fast enough outward that the
    growing node weights are beaten; f = 1 is the canonical divergent case.
    """
    cfg = cfg or DEFAULT_TRUNCATION
    p, q = params.p, params.q
    Q = q / p
    A = (1.0 / p) if node_scale is None else float(node_scale)
    if A <= 0:
        raise ValueError("node_scale must be positive")
    acc = KahanSum()

    # inward: j = 0, 1, 2, ... nodes decrease to 0
    node = A
    below = 0
    inward_done = False
    for _ in range(cfg.max_j_pos):
        term = _term_value(f(node), (p - q) * node)
        acc.add(term)
        if abs(term) <= cfg.integral_tol * max(abs(acc.total), 1e-300):
            below += 1
            if below >= 3:
                inward_done = True
                break
        else:
            below = 0
        node *= Q
    if not inward_done:
        raise NonConvergence(
            f"small-node tail still above tolerance after {cfg.max_j_pos} nodes",
            context="small-node tail")

    # outward: j = -1, -2, ... nodes grow; guard against divergent integrands
    node = A / Q
    below = 0
    prev = math.inf
    growth_streak = 0
    for _ in range(cfg.max_j_neg):
        term = _term_value(f(node), (p - q) * node)
        acc.add(term)
        mag = abs(term)
        if mag <= cfg.integral_tol * max(abs(acc.total), 1e-300):
            below += 1
            if below >= 3:
                return acc.total
        else:
            below = 0
        # terms that keep growing and already dominate the sum cannot recover
        growth_streak = growth_streak + 1 if mag > prev else 0
        if growth_streak >= 25 and mag > abs(acc.total):
            raise NonConvergence(
                "large-node tail diverges (terms grow without bound)",
                context="large-node tail")
        prev = mag
        node /= Q
    raise NonConvergence(
        f"large-node tail still above tolerance after {cfg.max_j_neg} nodes",
        context="large-node tail")
