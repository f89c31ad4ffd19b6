"""Two-point correlation of Riemann zeros from prime sums (diagonal and off-diagonal terms), with its expansions.

r2(eps) = rho^2 + r2_diag(eps) + r2_off(eps), unfolded as
R2(s) = r2(s / rho) / rho^2 with rho = log(E / 2 pi) / (2 pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import ConstantSet, PrimeTable, log_power_tail, sieve
from .curves import CorrelationCurve
from .errors import DomainError, SingularityError
from .zetaline import _derivs, d2_log_zeta_sq_regular

TWO_PI = 2.0 * math.pi
# primes per block times eps points per call stays under this many complex entries
BLOCK_ENTRIES = 1 << 22
EXPANSION_BELOW = 1e-3
IMAG_TOL = 1e-12


@dataclass(frozen=True)
class HeightContext:
    e_height: float
    rho_bar: float
    n0: float

    @classmethod
    def at(cls, e_height: float) -> "HeightContext":
        e_height = float(e_height)
        if not e_height > TWO_PI:
            raise ValueError(f"height must exceed 2*pi, got {e_height}")
        n0 = math.log(e_height / TWO_PI)
        return cls(e_height, n0 / TWO_PI, n0)


def _table(primes) -> PrimeTable:
    if isinstance(primes, PrimeTable):
        if len(primes.primes) == 0:
            raise ValueError("empty prime table")
        return primes
    return sieve(int(primes))


def _clog1p(z):
    """log(1 + z) for complex z, accurate when |z| is small."""
    re, im = z.real, z.imag
    return 0.5 * np.log1p(2.0 * re + re * re + im * im) + 1j * np.arctan2(im, 1.0 + re)


def _prime_blocks(table: PrimeTable, n_eps: int):
    p = table.primes.astype(float)
    size = max(64, BLOCK_ENTRIES // max(n_eps, 1))
    for i in range(0, len(p), size):
        yield p[i : i + size]


def diag_prime_sum(eps, primes) -> np.ndarray:
    """sum_p log^2 p * sum_{r>=2} (r-1) p^-r cos(eps r log p).

    This is the second eps-derivative of sum_p sum_r (1-r)/(r^2 p^r) cos(eps r log p),
    with the r-sum in closed form: Re[x^2 / (1 - x)^2], x = p^(-1 + i eps).
    """
    table = _table(primes)
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    total = np.zeros(eps.shape)
    for p in _prime_blocks(table, eps.size):
        logp = np.log(p)[:, None]
        x = np.exp((-1.0 + 1j * eps[None, :]) * logp)
        total += np.sum(logp**2 * np.real(x * x / (1.0 - x) ** 2), axis=0)
    return total


def euler_product(eps, primes, return_tail: bool = False):
    """prod_p [1 - (1 - p^(i eps))^2 / (p - 1)^2], summed in log space.

    With ``return_tail`` also returns a bound on the relative error from
    dropping primes above the sieve limit.
    """
    table = _table(primes)
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    log_total = np.zeros(eps.shape, dtype=complex)
    for p in _prime_blocks(table, eps.size):
        logp = np.log(p)[:, None]
        one_minus = -np.expm1(1j * eps[None, :] * logp)
        log_total += np.sum(_clog1p(-(one_minus**2) / (p[:, None] - 1.0) ** 2), axis=0)
    out = np.exp(log_total)
    if not return_tail:
        return out
    L = table.limit
    # |1 - p^(i eps)|^2 <= min(4, eps^2 log^2 p); |log(1+z)| <= 2|z| for |z| <= 1/2
    small = eps**2 * 4.0 * log_power_tail(2, L)
    crude = 16.0 / max(L - 1, 1)
    bound = 2.0 * np.minimum(small, crude)
    return out, np.expm1(bound)


def r2_diag(ctx: HeightContext, epsilon, primes):
    """Diagonal part -(1/4 pi^2) d^2/d eps^2 [log|zeta(1+i eps)|^2 + 2 sum_p sum_r ...]."""
    eps = np.asarray(epsilon, dtype=float)
    if np.any(eps == 0):
        raise SingularityError("r2_diag has a 1/eps^2 pole at eps = 0")
    out = r2_diag_regular(ctx, eps, primes) - 1.0 / (2.0 * math.pi**2 * eps**2)
    return float(out) if np.ndim(epsilon) == 0 else out


def r2_diag_regular(ctx: HeightContext, epsilon, primes):
    """r2_diag(eps) + 1/(2 pi^2 eps^2): the diagonal term with its pole removed, finite at 0."""
    eps = np.atleast_1d(np.asarray(epsilon, dtype=float))
    zeta_part = np.atleast_1d(d2_log_zeta_sq_regular(eps))
    out = -(zeta_part + 2.0 * diag_prime_sum(eps, primes)) / (4.0 * math.pi**2)
    return float(out[0]) if np.ndim(epsilon) == 0 else out


def _off_complex(ctx, eps, primes):
    z, _, _ = _derivs(eps)
    carrier = np.exp(1j * TWO_PI * ctx.rho_bar * eps)
    half = np.abs(z) ** 2 * carrier * euler_product(eps, primes) / (4.0 * math.pi**2)
    total = half + np.conj(half)
    if np.any(np.abs(total.imag) > IMAG_TOL * np.maximum(1.0, np.abs(total.real))):
        raise ArithmeticError("off-diagonal term failed to come out real")
    return total.real, z


def r2_off(ctx: HeightContext, epsilon, primes):
    """Off-diagonal part (1/4 pi^2)|zeta(1+i eps)|^2 e^(2 pi i rho eps) prod_p[...] + c.c."""
    eps = np.atleast_1d(np.asarray(epsilon, dtype=float))
    if np.any(eps == 0):
        raise SingularityError("r2_off has a 1/eps^2 pole at eps = 0")
    out, _ = _off_complex(ctx, eps, primes)
    return float(out[0]) if np.ndim(epsilon) == 0 else out


def r2_unfolded(ctx: HeightContext, s, primes, constants: ConstantSet | None = None):
    """R2(s) = [rho^2 + r2_diag(s/rho) + r2_off(s/rho)] / rho^2.

    The two 1/eps^2 poles are combined before cancelling. Points with
    s < 1e-3 use the additive expansion (needs ``constants``).
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr <= 0):
        raise DomainError("r2_unfolded needs s > 0")
    rho = ctx.rho_bar
    out = np.empty(s_arr.shape)
    tiny = s_arr < EXPANSION_BELOW
    if np.any(tiny):
        if constants is None:
            raise ValueError("constants are required to evaluate s < 1e-3")
        out[tiny] = r2_expansion(ctx, s_arr[tiny], constants, "additive")
    far = ~tiny
    if np.any(far):
        eps = s_arr[far] / rho
        z, _, _ = _derivs(eps)
        carrier = np.exp(1j * TWO_PI * rho * eps)
        prod = euler_product(eps, primes)
        # pole of the diagonal term plus the full off-diagonal term, over a common 1/eps^2
        eps2_zeta2 = np.abs(eps * z) ** 2
        poles = (eps2_zeta2 * np.real(carrier * prod) - 1.0) / (2.0 * math.pi**2 * eps**2)
        diag_reg = np.atleast_1d(r2_diag_regular(ctx, eps, primes))
        out[far] = 1.0 + (diag_reg + poles) / rho**2
    return float(out[0]) if np.ndim(s) == 0 else out


def alpha_of(ctx: HeightContext, constants: ConstantSet) -> float:
    return 1.0 + constants.c_ratio / ctx.n0


def r2_expansion(ctx: HeightContext, s, constants: ConstantSet, form: str = "additive"):
    """Large-height expansion of R2 through rho^-3 (additive) or with the s -> alpha s rescale."""
    s = np.asarray(s, dtype=float)
    rho = ctx.rho_bar
    lam = constants.lam
    sinc2 = np.sinc(s) ** 2
    if form == "additive":
        out = (
            1.0
            - sinc2
            - lam * np.sin(math.pi * s) ** 2 / (math.pi**2 * rho**2)
            - constants.q * s * np.sin(TWO_PI * s) / (2.0 * math.pi**2 * rho**3)
        )
    elif form == "rescaled":
        alpha = alpha_of(ctx, constants)
        out = 1.0 - sinc2 - lam * np.sin(math.pi * alpha * s) ** 2 / (math.pi**2 * rho**2)
    else:
        raise ValueError(f"form must be 'additive' or 'rescaled', got {form!r}")
    return float(out) if out.ndim == 0 else out


def correlation_curve(ctx: HeightContext, grid, primes=None, constants: ConstantSet | None = None,
                      origin: str = "prime_full", form: str = "additive") -> CorrelationCurve:
    grid = np.asarray(grid, dtype=float)
    if origin == "prime_full":
        values = r2_unfolded(ctx, grid, primes, constants)
    elif origin == "prime_expansion":
        values = r2_expansion(ctx, grid, constants, form)
    else:
        raise ValueError(f"origin must be prime_full or prime_expansion, got {origin!r}")
    meta = {"e_height": ctx.e_height, "rho_bar": ctx.rho_bar, "form": form if origin == "prime_expansion" else None}
    return CorrelationCurve(grid, np.atleast_1d(values), origin=origin, meta=meta)
