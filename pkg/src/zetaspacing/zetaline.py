"""zeta(1 + i*eps) with first and second eps-derivatives.

Two branches: the Laurent series about the pole (Stieltjes constants
through gamma_6) for |eps| < 0.1, Euler-Maclaurin summation otherwise.
Derivatives are differentiated term by term in both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli

from .constants import stieltjes_gamma
from .errors import DomainError, SingularityError

SWITCH = 0.1
MAX_EPS = 1e3
LAURENT_TERMS = 7
EM_CORRECTIONS = 6


@dataclass(frozen=True)
class ZetaLineValue:
    epsilon: float
    zeta: complex
    dzeta: complex
    ddzeta: complex
    method: str


@lru_cache(maxsize=1)
def _laurent_coeffs() -> np.ndarray:
    # zeta(1+x) = 1/x + sum_n a_n x^n
    return np.array([(-1) ** n * stieltjes_gamma(n) / math.factorial(n) for n in range(LAURENT_TERMS)])


def _laurent(eps):
    x = 1j * eps
    a = _laurent_coeffs()
    z = 1.0 / x + np.polynomial.polynomial.polyval(x, a)
    zx = -1.0 / x**2 + np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(a))
    zxx = 2.0 / x**3 + np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(a, 2))
    # d/deps = i d/dx
    return z, 1j * zx, -zxx


def _em_terms(eps):
    n_terms = int(max(50, math.ceil(10 * np.max(np.abs(eps)))))
    s = 1.0 + 1j * np.asarray(eps, dtype=complex)
    k = np.arange(1, n_terms, dtype=float)[:, None]
    logk = np.log(k)
    powk = np.exp(-s[None, :] * logk)
    z = powk.sum(axis=0)
    z1 = -(logk * powk).sum(axis=0)
    z2 = (logk**2 * powk).sum(axis=0)

    N = float(n_terms)
    lnN = math.log(N)
    # N^(1-s)/(s-1)
    g = np.exp((1.0 - s) * lnN)
    h = 1.0 / (s - 1.0)
    z += g * h
    z1 += -lnN * g * h - g * h**2
    z2 += lnN**2 * g * h + 2 * lnN * g * h**2 + 2 * g * h**3
    # N^(-s)/2
    g = 0.5 * np.exp(-s * lnN)
    z += g
    z1 += -lnN * g
    z2 += lnN**2 * g

    b = bernoulli(2 * EM_CORRECTIONS)
    poch = np.ones_like(s)
    s1 = np.zeros_like(s)
    s2 = np.zeros_like(s)
    done = 0
    for j in range(1, EM_CORRECTIONS + 1):
        m = 2 * j - 1
        # rising factorial s(s+1)...(s+m-1), with its log-derivative sums
        for idx in range(done, m):
            poch = poch * (s + idx)
            s1 = s1 + 1.0 / (s + idx)
            s2 = s2 + 1.0 / (s + idx) ** 2
        done = m
        c = b[2 * j] / math.factorial(2 * j)
        hN = np.exp(-(s + m) * lnN)
        g0, g1, g2 = poch, poch * s1, poch * (s1**2 - s2)
        z += c * g0 * hN
        z1 += c * (g1 - lnN * g0) * hN
        z2 += c * (g2 - 2 * lnN * g1 + lnN**2 * g0) * hN
    # d/deps = i d/ds
    return z, 1j * z1, -z2


def _derivs(eps: np.ndarray):
    eps = np.asarray(eps, dtype=float)
    if np.any(np.abs(eps) > MAX_EPS):
        raise DomainError(f"|eps| must be <= {MAX_EPS}")
    z = np.empty(eps.shape, dtype=complex)
    z1 = np.empty_like(z)
    z2 = np.empty_like(z)
    near = np.abs(eps) < SWITCH
    if np.any(near):
        z[near], z1[near], z2[near] = _laurent(eps[near])
    if np.any(~near):
        z[~near], z1[~near], z2[~near] = _em_terms(eps[~near])
    return z, z1, z2


def zeta_on_line(epsilon: float, method: str | None = None) -> ZetaLineValue:
    """zeta(1+i*eps) and its eps-derivatives.

    ``method`` forces a branch ("laurent" or "euler_maclaurin"); by default
    the branch is chosen by ``|eps| < 0.1``.
    """
    eps = float(epsilon)
    if abs(eps) > MAX_EPS:
        raise DomainError(f"|eps| must be <= {MAX_EPS}, got {eps}")
    if method is None:
        method = "laurent" if abs(eps) < SWITCH else "euler_maclaurin"
    if eps == 0.0:
        raise SingularityError("zeta(1+i*eps) has a pole at eps = 0")
    if method == "laurent":
        z, z1, z2 = _laurent(np.array([eps]))
    elif method == "euler_maclaurin":
        z, z1, z2 = _em_terms(np.array([eps]))
    else:
        raise ValueError(f"unknown method {method!r}")
    return ZetaLineValue(eps, complex(z[0]), complex(z1[0]), complex(z2[0]), method)


def zeta_regular_part(epsilon: float = 0.0) -> complex:
    """zeta(1+i*eps) - 1/(i*eps); equals gamma_0 at eps = 0."""
    x = 1j * float(epsilon)
    return complex(np.polynomial.polynomial.polyval(x, _laurent_coeffs()))


def d2_log_zeta_sq(epsilon):
    """Second eps-derivative of log|zeta(1+i*eps)|^2; accepts scalars or arrays.

    Equal to ``2 Re(z''/z - (z'/z)^2)``. Behaves like ``2/eps^2`` near 0.
    """
    eps = np.asarray(epsilon, dtype=float)
    if np.any(eps == 0.0):
        raise SingularityError("log|zeta(1+i*eps)|^2 is singular at eps = 0")
    z, z1, z2 = _derivs(np.atleast_1d(eps))
    w = z1 / z
    out = 2.0 * np.real(z2 / z - w * w)
    return float(out[0]) if eps.ndim == 0 else out


def _d2_log_u(eps):
    # u(x) = x * zeta(1+x) = 1 + sum a_n x^(n+1), analytic at 0
    a = np.concatenate([[1.0], _laurent_coeffs()])
    P = np.polynomial.polynomial
    x = 1j * eps
    u = P.polyval(x, a)
    u1 = P.polyval(x, P.polyder(a))
    u2 = P.polyval(x, P.polyder(a, 2))
    w = u1 / u
    return -2.0 * np.real(u2 / u - w * w)


def d2_log_zeta_sq_regular(epsilon):
    """``d2_log_zeta_sq(eps) - 2/eps^2``, finite (and evaluated without cancellation) at eps = 0."""
    eps = np.atleast_1d(np.asarray(epsilon, dtype=float))
    out = np.empty(eps.shape)
    near = np.abs(eps) < SWITCH
    out[near] = _d2_log_u(eps[near])
    far = ~near
    if np.any(far):
        out[far] = d2_log_zeta_sq(eps[far]) - 2.0 / eps[far] ** 2
    return float(out[0]) if np.ndim(epsilon) == 0 else out
