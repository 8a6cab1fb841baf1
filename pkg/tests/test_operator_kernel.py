"""Basis weights, integral kernel, and the shifted argument map."""
import math

import numpy as np
import pytest

from pqbaskakov import (
    PqParams,
    StancuParams,
    TruncationConfig,
    baskakov_basis,
    basis_row,
    durrmeyer_weight,
    jackson_improper,
    pq_int,
    stancu_argument,
)
from pqbaskakov._family import (
    aligned_scale,
    choose_k_max,
    integral_family,
    log_basis_row,
)

P98 = PqParams(0.9, 0.8)
PARAM_SET = (PqParams(1.0, 0.9), PqParams(0.9, 0.8), PqParams(0.95, 0.9))

# frozen: log of the basis weight at n=100, k=40, x=1, (p,q)=(0.9,0.8),
# computed independently at 60 decimal digits
LOG_B_100_40 = -87.30481545019053837577
# frozen: kernel values at n=5, k=2, t=0.1, (p,q)=(0.9,0.8)
DW_NORMALIZED = 0.0239707658063963169353
DW_LITERAL = 2.959353803258804559913


def test_basis_hand_values():
    # n=2, x=1: rising(1,2) = 3.4, rising(1,3) = 4.93, binom(2,1) = 1.7
    assert baskakov_basis(2, 0, 1.0, P98).to_float() == pytest.approx(
        0.9 / 3.4, rel=1e-13)
    assert baskakov_basis(2, 1, 1.0, P98).to_float() == pytest.approx(
        1.7 * 0.81 / 4.93, rel=1e-13)


def test_basis_frozen_log_value():
    got = baskakov_basis(100, 40, 1.0, P98).log_magnitude
    assert got == pytest.approx(LOG_B_100_40, abs=1e-9)


def test_basis_at_zero():
    assert baskakov_basis(7, 0, 0.0, P98).to_float() == 1.0
    assert baskakov_basis(7, 3, 0.0, P98).to_float() == 0.0


def test_basis_validation():
    with pytest.raises(ValueError):
        baskakov_basis(0, 0, 1.0, P98)
    with pytest.raises(ValueError):
        baskakov_basis(3, -1, 1.0, P98)
    with pytest.raises(ValueError):
        baskakov_basis(3, 0, -0.1, P98)


def test_basis_classical_q_reduction():
    # at p=1 the weight must equal the classical one-parameter form
    q, x, n = 0.9, 1.0, 4

    def qint(m):
        return sum(q ** i for i in range(m))

    def qbinom(m, k):
        v = 1.0
        for i in range(1, k + 1):
            v *= qint(m - k + i) / qint(i)
        return v

    for k in (0, 1, 3, 7):
        ref = qbinom(n + k - 1, k) * q ** (k * (k - 1) / 2.0) * x ** k
        ref /= math.prod(1.0 + q ** j * x for j in range(n + k))
        got = baskakov_basis(n, k, x, PqParams(1.0, q)).to_float()
        assert got == pytest.approx(ref, rel=1e-10), k


def test_partition_of_unity():
    for params in PARAM_SET:
        for n, x in ((2, 0.5), (5, 1.0), (10, 2.0), (50, 3.0)):
            total = sum(term.log_weight.to_float()
                        for term in basis_row(n, x, params))
            assert total == pytest.approx(1.0, abs=1e-8), (params, n, x)


def test_basis_row_at_zero():
    row = basis_row(6, 0.0, P98)
    vals = [term.log_weight.to_float() for term in row]
    assert vals[0] == 1.0
    assert all(v == 0.0 for v in vals[1:])


def test_basis_row_matches_vectorized_engine():
    for n, x in ((5, 1.0), (20, 2.5)):
        km = choose_k_max(n, 0.9, 0.8, x, 1e-12, 2000)
        lb = log_basis_row(n, 0.9, 0.8, x, km)
        for k in range(km + 1):
            assert lb[k] == pytest.approx(
                baskakov_basis(n, k, x, P98).log_magnitude, abs=1e-10), (n, k)


def test_durrmeyer_frozen_values():
    got = durrmeyer_weight(5, 2, 0.1, P98).to_float()
    assert got == pytest.approx(DW_NORMALIZED, rel=1e-9)
    lit = durrmeyer_weight(5, 2, 0.1, P98, literal_kernel=True).to_float()
    assert lit == pytest.approx(DW_LITERAL, rel=1e-9)


def test_durrmeyer_at_zero():
    assert durrmeyer_weight(4, 0, 0.0, P98).to_float() == 1.0
    assert durrmeyer_weight(4, 2, 0.0, P98).to_float() == 0.0


def test_durrmeyer_vanishes_on_kernel_zero():
    # t placed on a zero of the decaying exponential
    p, q = 0.9, 0.8
    Q = q / p
    nn = pq_int(5, P98)
    t0 = Q ** (-2) / (1.0 - Q) / (q * nn)
    assert durrmeyer_weight(5, 1, t0, P98).sign == 0


def test_durrmeyer_validation():
    with pytest.raises(ValueError):
        durrmeyer_weight(0, 0, 0.1, P98)
    with pytest.raises(ValueError):
        durrmeyer_weight(3, -1, 0.1, P98)
    with pytest.raises(ValueError):
        durrmeyer_weight(3, 0, -0.1, P98)


def test_kernel_mass_normalization_through_k10():
    # [n] * integral of the normalized kernel is exactly 1 for every k
    nn = pq_int(5, P98)
    cfg = TruncationConfig(max_j_pos=3000, max_j_neg=3000)
    scale = aligned_scale(5, 0.9, 0.8)
    for k in range(11):
        mass = nn * jackson_improper(
            lambda t, k=k: durrmeyer_weight(5, k, t, P98), P98, cfg,
            node_scale=scale)
        assert mass == pytest.approx(1.0, abs=1e-7), k


def test_stancu_argument_values():
    st = StancuParams(0.1, 0.5)
    # at t = 0 only the shift survives: alpha / ([n] + beta)
    assert stancu_argument(2, 0, 0.0, P98, st) == pytest.approx(
        0.1 / 2.2, rel=1e-13)
    # unshifted k=1 argument collapses to p^n t
    plain = StancuParams(0.0, 0.0)
    for t in (0.1, 1.0, 3.0):
        assert stancu_argument(4, 1, t, P98, plain) == pytest.approx(
            0.9 ** 4 * t, rel=1e-12)


def test_stancu_argument_monotone_in_t():
    st = StancuParams(0.1, 0.5)
    vals = [stancu_argument(5, 3, t, P98, st) for t in (0.0, 0.5, 1.0, 2.0)]
    assert vals == sorted(vals)
    with pytest.raises(ValueError):
        stancu_argument(5, 3, -1.0, P98, st)


def test_stancu_params_validation():
    with pytest.raises(ValueError):
        StancuParams(-0.1, 0.5)
    with pytest.raises(ValueError):
        StancuParams(0.6, 0.5)
    StancuParams(0.0, 0.0)
    StancuParams(0.5, 0.5)


def test_integral_family_matches_scalar_path():
    # the vectorized rows must agree with kernel-times-argument integrals
    # assembled from the scalar public API
    n = 5
    st = StancuParams(0.1, 0.5)
    nn = pq_int(n, P98)
    cfg = TruncationConfig(max_j_pos=3000, max_j_neg=3000)
    scale = aligned_scale(n, 0.9, 0.8)
    fam = integral_family(n, 0.9, 0.8, st.alpha, st.beta, 5,
                          lambda s: s, 1e-12, 3000)
    for k in range(6):
        def f(t, k=k):
            w = durrmeyer_weight(n, k, t, P98)
            return w.to_float() * stancu_argument(n, k, t, P98, st)
        ref = nn * jackson_improper(f, P98, cfg, node_scale=scale)
        assert fam[k] == pytest.approx(ref, rel=1e-9), k
