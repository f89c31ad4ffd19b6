import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetaspacing.constants import (
    ConstantSet,
    build_constant_set,
    compute_cn,
    compute_q,
    log_power_tail,
    sieve,
    stieltjes,
    stieltjes_gamma,
)


def trial_division_primes(limit):
    out = []
    for m in range(2, limit + 1):
        if all(m % d for d in range(2, math.isqrt(m) + 1)):
            out.append(m)
    return out


def test_sieve_small_tables():
    assert sieve(10).primes.tolist() == [2, 3, 5, 7]
    assert sieve(2).primes.tolist() == [2]
    assert sieve(3).primes.tolist() == [2, 3]


def test_sieve_rejects_small_limit():
    with pytest.raises(ValueError):
        sieve(1)


def test_prime_count_million(primes6):
    assert len(primes6) == 78498


@pytest.mark.parametrize("lo", [0, 999_000, 500_000])
def test_sieve_matches_trial_division_on_segments(primes6, lo):
    hi = lo + 1000
    ours = primes6.primes[(primes6.primes >= lo) & (primes6.primes <= hi)].tolist()
    ref = [m for m in range(max(lo, 2), hi + 1) if all(m % d for d in range(2, math.isqrt(m) + 1))]
    assert ours == ref


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=3000), st.integers(min_value=64, max_value=600))
def test_segmented_sieve_independent_of_segment_size(limit, segment):
    assert sieve.__wrapped__(limit, segment).primes.tolist() == trial_division_primes(limit)


def test_c0_million(primes6):
    value, tail = compute_cn(0, primes6)
    assert value == pytest.approx(1.38559, abs=1e-4)
    assert 0 < tail < 1e-3


def test_c0_doubled_limit_within_tail(primes6):
    v1, t1 = compute_cn(0, primes6)
    v2, _ = compute_cn(0, sieve(2 * 10**6))
    assert abs(v1 - v2) <= t1


def test_c1_brute_force_double_sum(primes6):
    # defining double sum over p <= 1e4, r <= 200, in extended precision
    mpmath.mp.dps = 30
    brute = mpmath.mpf(0)
    for p in trial_division_primes(10**4):
        lp = mpmath.log(p)
        inner = mpmath.fsum((r - 1) * mpmath.mpf(r) ** 2 * mpmath.mpf(p) ** (-r) for r in range(2, 201))
        brute += lp**4 * inner
    brute = -brute / 2
    small, small_tail = compute_cn(1, sieve(10**4))
    assert abs(float(brute) - small) < 1e-9 * abs(small)
    value, tail = compute_cn(1, primes6)
    assert abs(value - float(brute)) <= small_tail + tail


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_cn_tail_bound_is_honest(n):
    lo, lo_tail = compute_cn(n, sieve(10**3))
    hi, _ = compute_cn(n, sieve(10**5))
    assert abs(lo - hi) <= lo_tail


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_cn_sign_alternates(primes6, n):
    value, _ = compute_cn(n, sieve(10**4))
    assert math.copysign(1, value) == (-1) ** n


def test_cn_order_and_table_validation(primes6):
    with pytest.raises(ValueError):
        compute_cn(5, primes6)
    with pytest.raises(ValueError):
        compute_cn(-1, primes6)
    empty = type(primes6)(limit=1, primes=np.array([], dtype=np.int64))
    with pytest.raises(ValueError):
        compute_cn(0, empty)
    with pytest.raises(ValueError):
        compute_q(empty)


def test_c0_closed_form_matches_truncated_r_sum():
    # 1/(p-1)^2 = sum_{r>=2} (r-1) p^-r
    for p in trial_division_primes(200):
        trunc = math.fsum((r - 1) * float(p) ** -r for r in range(2, 101))
        assert abs(1.0 / (p - 1) ** 2 - trunc) <= 1e-12


def test_q_hand_sum():
    # sum over p in {2, 3, 5, 7} of log^3 p / (p-1)^2
    hand = sum(math.log(p) ** 3 / (p - 1) ** 2 for p in (2, 3, 5, 7))
    value, tail = compute_q(sieve(10))
    assert value == pytest.approx(hand, rel=1e-14)
    assert value == pytest.approx(1.1297493594924934, rel=1e-12)
    assert tail > 1.0


def test_q_million(primes6):
    value, tail = compute_q(primes6)
    assert value == pytest.approx(2.3157, abs=5e-4)
    v2, _ = compute_q(sieve(2 * 10**6))
    assert abs(value - v2) <= tail


def test_log_power_tail_bounds_direct_sum():
    for k in (2, 3, 4):
        L = 1000
        m = np.arange(L + 1, 2_000_001, dtype=float)
        partial = math.fsum(np.log(m) ** k / m**2)
        assert partial < log_power_tail(k, L)
        assert log_power_tail(k, L) < 2.0 * (partial + 1.0)


def test_stieltjes_reference_digits():
    g0, g1 = stieltjes()
    assert g0 == pytest.approx(0.577215664901533, abs=1e-14)
    assert g1 == pytest.approx(-0.0728158454836767, abs=1e-14)


@pytest.mark.parametrize("n", range(7))
def test_stieltjes_against_mpmath(n):
    assert stieltjes_gamma(n) == pytest.approx(float(mpmath.stieltjes(n)), abs=1e-12)


def test_laurent_pole_residue():
    g = [stieltjes_gamma(n) for n in range(7)]
    for x in (1e-2, 1e-4, 1e-6):
        z = 1 / x + sum((-1) ** n * g[n] / math.factorial(n) * x**n for n in range(7))
        assert x * z == pytest.approx(1.0, abs=2 * x)


def test_constant_set_reference_values(constants7):
    assert constants7.lam == pytest.approx(1.57314, abs=5e-5)
    assert constants7.c_ratio == pytest.approx(1.4720, abs=5e-4)
    assert constants7.lam == pytest.approx(
        constants7.gamma0**2 + 2 * constants7.gamma1 + constants7.c0, rel=1e-15
    )


def test_constant_set_coarse_limit_within_tail(constants7):
    coarse = build_constant_set(10**3)
    assert abs(coarse.lam - constants7.lam) <= coarse.tail_error
    assert coarse.tail_error > constants7.tail_error


def test_constant_set_round_trip(constants7):
    d = constants7.to_dict()
    assert "lambda" in d and "tail_error" in d and d["sieve_limit"] == 10**7
    assert ConstantSet.from_dict(d) == constants7


def test_build_rejects_bad_limit():
    with pytest.raises(ValueError):
        build_constant_set(1)
