"""Vectorized evaluation engine shared by the operator entry points.

The operator is a basis-weighted sum of per-index integrals. This module
builds the whole per-index integral family on one aligned node lattice and
the log-domain basis row, both as numpy arrays. The scalar public API in
``operator_kernel``/``pq_integrate`` computes the same quantities one term
at a time; tests pin the two paths against each other.

Node lattice
------------
The improper integral is discretized on t_j = C * Q^j (Q = q/p, j integer).
C is chosen so that q*[n]*t_j = Q^j/(1-Q), which places every outward node
(j <= 0) on a zero of the decaying exponential kernel: the outward tail of
the bilateral sum vanishes identically and the kept terms (j >= 1) are all
positive. Any other scale changes the sum only by a superexponentially
small lattice oscillation (~1e-37 at Q = 0.9), far below double precision,
but generic scales leave a slowly-cancelling outward tail whose floor is
the accuracy ceiling; the aligned scale removes the ceiling entirely.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .pq_core import NonConvergence, _pq_int


def pq_int_float(n: int, p: float, q: float) -> float:
    return _pq_int(n, p, q)


def aligned_scale(n: int, p: float, q: float) -> float:
    """Lattice scale that aligns the nodes with the kernel's zero set."""
    return p / (q * _pq_int(n, p, q) * (p - q))


def _ln_pq_int(m: np.ndarray, lnp: float, lnQ: float) -> np.ndarray:
    """log of the deformed integers via expm1, stable for Q -> 1."""
    num = np.expm1(m * lnQ)   # Q^m - 1, same sign as lnQ's
    den = math.expm1(lnQ)
    return (m - 1) * lnp + np.log(num / den)


def log_basis_row(n: int, p: float, q: float, x: float, k_max: int) -> np.ndarray:
    """log of the basis weights b_k(x), k = 0..k_max; -inf where the weight is 0."""
    out = np.full(k_max + 1, -np.inf)
    if x == 0.0:
        out[0] = 0.0  # only the k=0 weight survives, and it is exactly 1
        return out
    lnp, lnq, lnQ = math.log(p), math.log(q), math.log(q / p)
    lnx = math.log(x)
    Q = q / p
    k = np.arange(k_max + 1, dtype=float)

    # rising-power denominator, shared prefix of n factors plus one per k
    j0 = np.arange(n, dtype=float)
    lrise_n = float(np.sum(j0 * lnp + np.log1p(Q ** j0 * x)))
    jr = np.arange(n, n + k_max, dtype=float)
    lrise = lrise_n + np.concatenate(
        [[0.0], np.cumsum(jr * lnp + np.log1p(Q ** jr * x))])

    # binomial as a cumulative product of integer ratios
    i = np.arange(1, k_max + 1, dtype=float)
    lbin = np.concatenate(
        [[0.0], np.cumsum(_ln_pq_int(n + i - 1, lnp, lnQ) - _ln_pq_int(i, lnp, lnQ))])

    out[:] = (lbin + (k + n * (n - 1) / 2.0) * lnp + (k * (k - 1) / 2.0) * lnq
              + k * lnx - lrise)
    return out


def choose_k_max(n: int, p: float, q: float, x: float,
                 series_tol: float, max_k: int) -> int:
    """Basis truncation index: first k past the peak with 3 consecutive
    weights below series_tol relative to the largest weight seen."""
    if x == 0.0:
        return 3
    lnp, lnq, lnQ = math.log(p), math.log(q), math.log(q / p)
    lnx = math.log(x)
    Q = q / p
    j0 = np.arange(n, dtype=float)
    lb = n * (n - 1) / 2.0 * lnp - float(np.sum(j0 * lnp + np.log1p(Q ** j0 * x)))
    lbmax = lb
    cut = math.log(series_tol)
    below = 0
    for k in range(1, max_k + 1):
        m = n + k - 1
        lb += (float(_ln_pq_int(np.float64(m), lnp, lnQ))
               - float(_ln_pq_int(np.float64(k), lnp, lnQ))
               + lnp + (k - 1) * lnq + lnx
               - (m * lnp + math.log1p(Q ** m * x)))
        if lb > lbmax:
            lbmax = lb
            below = 0
        elif lb < lbmax + cut:
            below += 1
            if below >= 3:
                return max(k, 8)
        else:
            below = 0
    return max_k


def integral_family(n: int, p: float, q: float, alpha: float, beta: float,
                    k_max: int, fvec: Callable[[np.ndarray], np.ndarray],
                    integral_tol: float, max_j: int,
                    unpatched: bool = False) -> np.ndarray:
    """Per-index integrals I_k = [n] * integral of weight_k(t) f(arg_k(t)) dt
    for k = 0..k_max, all on the aligned lattice.

    fvec must map a float array of evaluation arguments to a float array.
    ``unpatched`` switches to the k-th weight without the t^k factor (and
    with the matching lower triangular p-power) as a diagnostic; see
    operator_kernel.durrmeyer_weight.
    """
    lnp, lnq = math.log(p), math.log(q)
    Q = q / p
    lnQ = lnq - lnp
    nn = _pq_int(n, p, q)
    ln_nn = math.log(nn)
    N = nn + beta
    lnC = lnp - lnq - ln_nn - math.log(p - q)

    j = np.arange(1, max_j + 1, dtype=float)
    # log (Q^j; Q)_infinity with a first-order remainder for the cut tail
    lg = np.log1p(-(Q ** j))
    lpoch = np.cumsum(lg[::-1])[::-1] - Q ** (max_j + 1) / (1.0 - Q)
    ln_t = lnC + j * lnQ
    lquad = math.log(p - q) + ln_t + ln_nn          # (p-q) * t_j * [n]
    lsig = (n - 1) * lnp + lnq + ln_nn + ln_t       # p^(n-1) q [n] t_j

    mi = np.arange(1, k_max + 2, dtype=float)
    ln_fact = np.concatenate([[0.0], np.cumsum(_ln_pq_int(mi, lnp, lnQ))])

    I = np.empty(k_max + 1)
    for k in range(k_max + 1):
        if unpatched:
            la = lquad + lpoch + (k * (k - 1) / 2.0) * lnp - ln_fact[k] + k * ln_nn
        else:
            la = (lquad + lpoch + (k * (k + 1) / 2.0) * lnp - ln_fact[k]
                  + k * (ln_nn + ln_t))
        sig = (np.exp(lsig + k * (lnp - lnq)) + alpha) / N
        jpk = int(np.argmax(la))
        if jpk >= la.size - 4:
            raise NonConvergence(
                f"weight envelope for k={k} peaks at the lattice edge; "
                f"increase max_j_pos beyond {max_j}", context="small-node tail")
        lamax = float(la[jpk])
        # exp underflows to exact 0 on the long rising prefix when Q -> 1;
        # that is why the stop scan must not start before the peak
        w = np.exp(la - lamax)
        terms = w * fvec(sig)
        csum = np.cumsum(terms)
        thr = integral_tol * np.maximum.accumulate(np.abs(csum)) + 1e-300
        ok = np.abs(terms) <= thr
        stop = -1
        run = 0
        for idx in range(jpk + 1, terms.size):
            run = run + 1 if ok[idx] else 0
            if run >= 3:
                stop = idx
                break
        if stop < 0:
            if not bool(np.all(ok[-3:])):
                raise NonConvergence(
                    f"integral row k={k} not resolved within {max_j} nodes; "
                    "increase max_j_pos", context="small-node tail")
            stop = terms.size - 1
        I[k] = csum[stop] * math.exp(lamax)
    return I
