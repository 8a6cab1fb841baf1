"""Deformed-integer arithmetic, exponentials, and log-domain helpers."""
import math

import pytest
from hypothesis import assume, given, strategies as st

from pqbaskakov import (
    KahanSum,
    LogValue,
    NonConvergence,
    PqParams,
    TruncationConfig,
    pq_binomial,
    pq_exponential,
    pq_exponential_log,
    pq_factorial,
    pq_int,
    pq_rising_power,
)

P98 = PqParams(0.9, 0.8)
PARAM_SET = (PqParams(1.0, 0.9), PqParams(0.9, 0.8), PqParams(0.95, 0.9))


@st.composite
def pq_params(draw):
    p = draw(st.floats(0.3, 1.0))
    frac = draw(st.floats(0.1, 0.95))
    return PqParams(p, p * frac)


def test_params_validation():
    with pytest.raises(ValueError):
        PqParams(0.8, 0.9)   # q > p
    with pytest.raises(ValueError):
        PqParams(1.1, 0.5)   # p > 1
    with pytest.raises(ValueError):
        PqParams(0.9, 0.0)   # q = 0
    with pytest.raises(ValueError):
        PqParams(0.9, 0.9)   # q = p


def test_truncation_config_validation():
    with pytest.raises(ValueError):
        TruncationConfig(series_tol=0.0)
    with pytest.raises(ValueError):
        TruncationConfig(integral_tol=-1e-9)
    with pytest.raises(ValueError):
        TruncationConfig(max_k=0)
    cfg = TruncationConfig()
    assert cfg.series_tol == 1e-12 and cfg.max_j_pos == 600


def test_pq_int_examples():
    assert pq_int(3, P98) == pytest.approx(2.17, abs=1e-12)
    assert pq_int(2, P98) == pytest.approx(1.7, abs=1e-12)
    assert pq_int(2, PqParams(1.0, 0.5)) == pytest.approx(1.5, abs=1e-15)
    assert pq_int(0, P98) == 0.0
    assert pq_int(1, P98) == 1.0


def test_pq_int_errors():
    with pytest.raises(ValueError):
        pq_int(-1, P98)


@given(pq_params(), st.integers(1, 60))
def test_pq_int_matches_ratio_form(params, n):
    assume(params.p - params.q > 0.05)
    ratio = (params.p ** n - params.q ** n) / (params.p - params.q)
    assert pq_int(n, params) == pytest.approx(ratio, rel=1e-12)


@given(pq_params(), st.integers(0, 50))
def test_pq_int_recurrences(params, n):
    p, q = params.p, params.q
    nxt = pq_int(n + 1, params)
    assert nxt == pytest.approx(p ** n + q * pq_int(n, params), rel=1e-12)
    assert nxt == pytest.approx(p * pq_int(n, params) + q ** n, rel=1e-12)


def test_pq_int_classical_limit():
    params = PqParams(1.0, 1.0 - 1e-6)
    for n in range(1, 21):
        assert pq_int(n, params) == pytest.approx(n, rel=1e-4)


def test_factorial_examples():
    assert pq_factorial(0, P98) == 1.0
    assert pq_factorial(2, P98) == pytest.approx(1.7, abs=1e-12)
    assert pq_factorial(3, P98) == pytest.approx(3.689, abs=1e-12)


@given(pq_params(), st.integers(1, 30))
def test_factorial_recurrence(params, n):
    assert pq_factorial(n, params) == pytest.approx(
        pq_int(n, params) * pq_factorial(n - 1, params), rel=1e-13)


def test_binomial_examples():
    assert pq_binomial(2, 1, P98) == pytest.approx(1.7, abs=1e-12)
    assert pq_binomial(5, 0, P98) == 1.0
    assert pq_binomial(5, 5, P98) == 1.0


def test_binomial_errors():
    with pytest.raises(ValueError):
        pq_binomial(3, 4, P98)
    with pytest.raises(ValueError):
        pq_binomial(-1, 0, P98)
    with pytest.raises(ValueError):
        pq_binomial(3, -1, P98)


@given(pq_params(), st.integers(0, 25), st.integers(0, 25))
def test_binomial_symmetry_and_factorial_path(params, n, k):
    assume(k <= n)
    b = pq_binomial(n, k, params)
    assert b == pytest.approx(pq_binomial(n, n - k, params), rel=1e-12)
    via_fact = pq_factorial(n, params) / (
        pq_factorial(k, params) * pq_factorial(n - k, params))
    assert b == pytest.approx(via_fact, rel=1e-11)


def test_rising_power_examples():
    assert pq_rising_power(1.0, 2, P98).to_float() == pytest.approx(3.4, rel=1e-13)
    # at x = 0 the product collapses to the pure triangular p-power
    assert pq_rising_power(0.0, 5, P98).to_float() == pytest.approx(
        0.3486784401, rel=1e-12)
    assert pq_rising_power(2.0, 0, P98).to_float() == 1.0


def test_rising_power_errors():
    with pytest.raises(ValueError):
        pq_rising_power(-0.5, 3, P98)
    with pytest.raises(ValueError):
        pq_rising_power(0.5, -1, P98)


@given(pq_params(), st.floats(0.0, 10.0), st.integers(0, 40))
def test_rising_power_recurrence(params, x, n):
    p, q = params.p, params.q
    lhs = pq_rising_power(x, n + 1, params).log_magnitude
    rhs = (pq_rising_power(x, n, params).log_magnitude
           + math.log(p ** n + q ** n * x))
    assert lhs == pytest.approx(rhs, abs=1e-10)


@given(st.floats(-1e6, 1e6))
def test_logvalue_roundtrip(v):
    # exp(log v) loses about |log v| ulps, up to ~8e-14 relative near the
    # underflow end of the strategy's range
    lv = LogValue.from_float(v)
    assert lv.to_float() == pytest.approx(v, rel=1e-12, abs=1e-300)
    if v == 0.0:
        assert lv.sign == 0


def test_logvalue_algebra():
    a = LogValue.from_float(-3.0)
    b = LogValue.from_float(0.5)
    assert (a * b).to_float() == pytest.approx(-1.5, rel=1e-15)
    assert a.scaled(-2.0).to_float() == pytest.approx(6.0, rel=1e-15)
    zero = LogValue.from_float(0.0)
    assert (a * zero).sign == 0
    assert zero.scaled(7.0).to_float() == 0.0


def test_kahan_accumulates_tiny_increments():
    acc = KahanSum()
    for _ in range(10_000):
        acc.add(0.1)
    assert abs(acc.total - 1000.0) < 1e-12


def test_exponential_kind_validation():
    with pytest.raises(ValueError):
        pq_exponential(1.0, "medium_e", P98)


def test_exponential_reciprocal_identity():
    # small_e(x) * big_E(-x) = 1 wherever both converge
    for params in PARAM_SET:
        for i in range(21):
            x = 0.25 * i
            prod = (pq_exponential(x, "small_e", params)
                    * pq_exponential(-x, "big_E", params))
            assert prod == pytest.approx(1.0, abs=1e-9), (params, x)


def test_big_e_matches_brute_series_at_p1():
    params = PqParams(1.0, 0.5)

    def qint(n):
        return sum(0.5 ** i for i in range(n))

    brute = sum(
        0.5 ** (n * (n - 1) / 2.0)
        / math.prod(qint(m) for m in range(1, n + 1))
        for n in range(60))
    assert pq_exponential(1.0, "big_E", params) == pytest.approx(brute, rel=1e-12)


def test_big_e_zero_lattice_snaps_exactly():
    # the decaying exponential vanishes on y_m = (q/p)^(-m)/(1 - q/p)
    p, q = 0.9, 0.8
    Q = q / p
    for m in (0, 1, 2, 5):
        y = Q ** (-m) / (1.0 - Q)
        assert pq_exponential_log(-y, PqParams(p, q)).sign == 0
        # snapping tolerates a few ulps of argument noise
        assert pq_exponential_log(-y * (1.0 + 1e-16), PqParams(p, q)).sign == 0


def test_big_e_negative_argument_positive_between_first_zeros():
    params = PqParams(0.9, 0.8)
    v = pq_exponential(-1.0, "big_E", params)
    assert 0.0 < v < 1.0


def test_exponential_series_budget_exhaustion():
    tiny = TruncationConfig(max_k=2)
    with pytest.raises(NonConvergence) as exc:
        pq_exponential(5.0, "small_e", PqParams(1.0, 0.9), tiny)
    assert exc.value.context == "series"


def test_big_e_negative_falls_back_instead_of_raising():
    # the alternating series cannot resolve this argument within 2 terms,
    # but the product continuation covers it
    tiny = TruncationConfig(max_k=2)
    v = pq_exponential(-3.0, "big_E", PqParams(0.9, 0.8), tiny)
    ref = pq_exponential_log(-3.0, PqParams(0.9, 0.8)).to_float()
    assert v == pytest.approx(ref, rel=1e-12)
