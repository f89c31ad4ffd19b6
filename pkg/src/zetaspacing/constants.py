"""Arithmetic constants: prime sums c_n and Q, Stieltjes constants, and the composites.

Prime sums run over a sieved table of primes up to ``limit``; every sum
comes with a rigorous bound on the part of the series beyond ``limit``.
Stieltjes constants are computed by Euler-Maclaurin summation, never
hardcoded.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import bernoulli

DEFAULT_SIEVE_LIMIT = 10**7
INNER_SUM_RTOL = 1e-16
MAX_CN_ORDER = 4


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray

    def __len__(self):
        return len(self.primes)


@dataclass(frozen=True)
class ConstantSet:
    gamma0: float
    gamma1: float
    c0: float
    q: float
    lam: float
    c_ratio: float
    tail_error: float
    c0_tail: float
    q_tail: float
    sieve_limit: int

    @property
    def lambda_(self) -> float:
        return self.lam

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ConstantSet":
        d = dict(d)
        d["lam"] = d.pop("lambda")
        return cls(**d)


def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


@lru_cache(maxsize=8)
def sieve(limit: int, segment: int = 1 << 21) -> PrimeTable:
    """All primes ``<= limit`` via a segmented sieve of Eratosthenes."""
    limit = int(limit)
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    root = math.isqrt(limit)
    base_limit = max(root, 2)
    base = _simple_sieve(base_limit)
    chunks = [base[base <= limit]]
    lo = base_limit + 1
    while lo <= limit:
        hi = min(lo + segment, limit + 1)
        flags = np.ones(hi - lo, dtype=bool)
        for p in base:
            start = max(p * p, -(-lo // p) * p)
            if start >= hi:
                continue
            flags[start - lo :: p] = False
        chunks.append(lo + np.flatnonzero(flags))
        lo = hi
    primes = np.concatenate(chunks).astype(np.int64)
    primes.setflags(write=False)
    return PrimeTable(limit=limit, primes=primes)


def _check_table(primes: PrimeTable):
    if len(primes.primes) == 0:
        raise ValueError("empty prime table")


def log_power_tail(k: int, limit: float) -> float:
    """Upper bound for ``sum_{m > limit} log(m)**k / m**2`` over all integers m.

    Integral comparison plus one maximal term, which covers the stretch
    where the summand still increases.
    """
    L = float(limit)
    lg = math.log(L)
    integral = sum(math.perm(k, j) * lg ** (k - j) for j in range(k + 1)) / L
    t_star = max(L, math.exp(k / 2))
    return integral + math.log(t_star) ** k / t_star**2


def _inner_sum_bound(n: int, x: float) -> float:
    """``sum_{r>=2} (r-1) r^{2n} x^{-(r-2)}`` for x >= 3; bounds p^2 times the inner sum for p >= x."""
    total, r = 0.0, 2
    while True:
        term = (r - 1) * r ** (2 * n) * x ** (-(r - 2))
        total += term
        if r > 4 * n + 4 and term < 1e-18 * total:
            return total
        r += 1


def compute_cn(n: int, primes: PrimeTable, rtol: float = INNER_SUM_RTOL) -> tuple[float, float]:
    """Prime sum c_n and a bound on its truncation error.

    ``c_n = (-1)^n/(2n)! * sum_p log(p)^(2n+2) * sum_{r>=1} (r-1) r^(2n) / p^r``.
    For n = 0 the inner sum is ``1/(p-1)^2``.
    """
    if n < 0 or n > MAX_CN_ORDER:
        raise ValueError(f"c_n order must be in [0, {MAX_CN_ORDER}], got {n}")
    _check_table(primes)
    p = primes.primes.astype(float)
    logp = np.log(p)
    if n == 0:
        inner = 1.0 / (p - 1.0) ** 2
        trunc = 0.0
    else:
        inner = np.zeros_like(p)
        active = len(p)
        r = 2
        while active:
            term = (r - 1) * float(r) ** (2 * n) * np.exp(-r * logp[:active])
            inner[:active] += term
            done = term < rtol * inner[:active]
            # terms decrease with p, so converged primes form a suffix once past the peak
            if r > 2 * n + 2:
                while active and done[active - 1]:
                    active -= 1
            r += 1
        trunc = rtol * 2
    weights = logp ** (2 * n + 2)
    body = math.fsum(weights * inner)
    scale = (-1) ** n / math.factorial(2 * n)
    value = scale * body
    L = primes.limit
    if n == 0:
        tail = 4.0 * log_power_tail(2, L)
    else:
        tail = _inner_sum_bound(n, max(L + 1, 3)) * log_power_tail(2 * n + 2, L) / math.factorial(2 * n)
    return value, tail + abs(value) * trunc


def compute_q(primes: PrimeTable) -> tuple[float, float]:
    """``Q = sum_p log(p)^3 / (p-1)^2`` and a bound on its truncation error."""
    _check_table(primes)
    p = primes.primes.astype(float)
    value = math.fsum(np.log(p) ** 3 / (p - 1.0) ** 2)
    return value, 4.0 * log_power_tail(3, primes.limit)


def _log_over_x_derivative_polys(n: int, order: int) -> list[Polynomial]:
    # d^j/dx^j [log(x)^n / x] = x^(-1-j) * P_j(log x)
    polys = [Polynomial([0.0] * n + [1.0])]
    for j in range(order):
        P = polys[-1]
        polys.append(P.deriv() - (1 + j) * P)
    return polys


@lru_cache(maxsize=None)
def stieltjes_gamma(n: int, cutoff: int = 50, corrections: int = 10) -> float:
    """Stieltjes constant gamma_n by Euler-Maclaurin summation.

    gamma_n = lim_m [sum_{k<=m} log(k)^n/k - log(m)^(n+1)/(n+1)]; the
    sum is taken directly below ``cutoff`` and the remainder handled with
    ``corrections`` Bernoulli terms.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    m = cutoff
    k = np.arange(1, m, dtype=float)
    head = math.fsum(np.log(k) ** n / k)
    lm = math.log(m)
    polys = _log_over_x_derivative_polys(n, 2 * corrections)
    parts = [head, lm**n / m / 2.0, -(lm ** (n + 1)) / (n + 1)]
    b = bernoulli(2 * corrections)
    for j in range(1, corrections + 1):
        deriv = polys[2 * j - 1](lm) * m ** (-2 * j)
        parts.append(-b[2 * j] / math.factorial(2 * j) * deriv)
    return math.fsum(parts)


def stieltjes() -> tuple[float, float]:
    """(gamma_0, gamma_1)."""
    return stieltjes_gamma(0), stieltjes_gamma(1)


def build_constant_set(limit: int = DEFAULT_SIEVE_LIMIT) -> ConstantSet:
    limit = int(limit)
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    table = sieve(limit)
    g0, g1 = stieltjes()
    c0, c0_tail = compute_cn(0, table)
    q, q_tail = compute_q(table)
    lam = g0 * g0 + 2.0 * g1 + c0
    return ConstantSet(
        gamma0=g0,
        gamma1=g1,
        c0=c0,
        q=q,
        lam=lam,
        c_ratio=q / lam,
        tail_error=max(c0_tail, q_tail),
        c0_tail=c0_tail,
        q_tail=q_tail,
        sieve_limit=limit,
    )
