"""Exact finite-N CUE statistics.

Kernel, two-point function and its large-N expansion, the gap probability
E(s) as an N x N determinant, and the nearest-neighbour spacing density
p_N(s) = E''(s). All distances are unfolded (mean spacing 1).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curves import CorrelationCurve, SpacingCurve
from .errors import ConditioningError, DomainError

TAYLOR_SWITCH = 1e-8
FALLBACK_FLOOR = 1e-8
NEGATIVE_TOL = 1e-10
DEFAULT_GRID = np.round(np.arange(0, 401) * 0.01, 10)


@dataclass(frozen=True)
class KernelSpec:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"matrix dimension must be an integer >= 2, got {self.n}")


def _dim(spec) -> int:
    n = spec.n if isinstance(spec, KernelSpec) else KernelSpec(int(spec)).n
    return int(n)


def _sinc(x):
    """sin(pi x)/(pi x) with a Taylor branch for |x| < 1e-8."""
    x = np.asarray(x, dtype=float)
    y = np.pi * x
    small = np.abs(x) < TAYLOR_SWITCH
    safe = np.where(small, 1.0, y)
    y2 = y * y
    return np.where(small, 1.0 - y2 / 6.0 + y2 * y2 / 120.0, np.sin(safe) / safe)


def kernel(spec, x, y=0.0):
    """sin(pi(x-y)) / (N sin(pi(x-y)/N)) with its removable singularities filled in.

    At x - y = mN the limit is (-1)^(m(N-1)).
    """
    n = _dim(spec)
    s = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    m = np.round(s / n)
    d = s - m * n
    sign = np.where((m * (n - 1)) % 2 == 0, 1.0, -1.0)
    out = sign * _sinc(d) / _sinc(d / n)
    return float(out) if out.ndim == 0 else out


def r2_asymptotic(s):
    """1 - (sin(pi s)/(pi s))^2."""
    out = 1.0 - _sinc(s) ** 2
    return float(out) if np.ndim(out) == 0 else out


def r2_cue_exact(spec, s):
    out = 1.0 - np.asarray(kernel(spec, s)) ** 2
    return float(out) if out.ndim == 0 else out


def r2_truncated(spec, s, order: int = 2):
    """Large-N expansion of the CUE_N two-point function through N^-2 or N^-4.

    The N^-4 coefficient is -(pi s)^2 sin^2(pi s) / 15, from the series of
    (x / sin x)^2 = 1 + x^2/3 + x^4/15 + ...
    """
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    n = _dim(spec)
    s = np.asarray(s, dtype=float)
    sin2 = np.sin(np.pi * s) ** 2
    out = 1.0 - _sinc(s) ** 2 - sin2 / (3.0 * n**2)
    if order == 4:
        out = out - (np.pi * s) ** 2 * sin2 / (15.0 * n**4)
    return float(out) if out.ndim == 0 else out


def correlation_curve(spec, grid, origin: str = "cue_exact", order: int = 4) -> CorrelationCurve:
    grid = np.asarray(grid, dtype=float)
    n = _dim(spec)
    if origin == "cue_exact":
        values = r2_cue_exact(n, grid)
    elif origin == "cue_expansion":
        values = r2_truncated(n, grid, order)
    else:
        raise ValueError(f"origin must be cue_exact or cue_expansion, got {origin!r}")
    meta = {"N": n, "order": order if origin != "cue_exact" else None}
    return CorrelationCurve(grid, np.atleast_1d(values), meta=meta, origin=origin)


def _kernel_matrices(n: int, s: np.ndarray):
    """Stacks of A(s), A'(s), A''(s) for the gap determinant, shape (len(s), n, n)."""
    d = np.subtract.outer(np.arange(n), np.arange(n)).astype(float)
    arg = np.pi * s[:, None, None] * d[None] / n
    sin_arg = np.sin(arg)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = sin_arg / (np.pi * d[None])
    diag = np.arange(n)
    a[:, diag, diag] = (s / n)[:, None]
    a1 = np.cos(arg) / n
    a2 = -np.pi * d[None] * sin_arg / n**2
    return a, a1, a2


def _check_domain(n, s):
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s < 0) or np.any(s > n):
        raise DomainError(f"s must lie in [0, N={n}]")
    return s


def gap_determinant(spec, s):
    """E(s) = det[delta_jk - sin(pi s (j-k)/N) / (pi (j-k))], the empty-arc probability.

    Eigenvalues of the (real symmetric) matrix are clipped to [0, 1],
    their exact range, before taking the product.
    """
    n = _dim(spec)
    arr = _check_domain(n, s)
    a, _, _ = _kernel_matrices(n, arr)
    lam = np.clip(np.linalg.eigvalsh(np.eye(n)[None] - a), 0.0, 1.0)
    out = np.prod(lam, axis=-1)
    out[arr == 0] = 1.0
    return float(out[0]) if np.ndim(s) == 0 else out


def _leave_out_products(lam: np.ndarray):
    """Products of all eigenvalues but one (vector) and but two (matrix), without division."""
    def leave_one(x):
        pre = np.concatenate([[1.0], np.cumprod(x[:-1])])
        suf = np.concatenate([np.cumprod(x[::-1][:-1])[::-1], [1.0]])
        return pre * suf

    n = len(lam)
    one = leave_one(lam)
    two = np.zeros((n, n))
    for i in range(n):
        rest = np.delete(lam, i)
        two[i, np.arange(n) != i] = leave_one(rest)
    return one, two


def _derivs_block(n: int, s: np.ndarray, cond_floor: float | None):
    a, a1, a2 = _kernel_matrices(n, s)
    lam, vec = np.linalg.eigh(np.eye(n)[None] - a)
    lam = np.clip(lam, 0.0, 1.0)
    e = np.prod(lam, axis=-1)
    d1 = np.empty_like(e)
    d2 = np.empty_like(e)
    for k in range(len(s)):
        if s[k] == n:
            # fully depleted circle: E, E' and E'' all vanish
            e[k] = d1[k] = d2[k] = 0.0
            continue
        lk = lam[k]
        if cond_floor is not None and lk[0] < cond_floor:
            raise ConditioningError(
                f"I - A is numerically singular at s = {float(s[k])!r} (smallest eigenvalue {lk[0]:.3e})",
                s=float(s[k]),
            )
        v = vec[k]
        p = v.T @ a1[k] @ v
        r = v.T @ a2[k] @ v
        dp = np.diag(p)
        if lk[0] > FALLBACK_FLOOR:
            w = 1.0 / lk
            one = e[k] * w
            two = np.outer(one, w)
        else:
            one, two = _leave_out_products(lk)
        d1[k] = -np.dot(dp, one)
        # i = j terms of the pair sum cancel identically, so no 1/lambda^2 appears
        pair = (np.outer(dp, dp) - p * p) * two
        d2[k] = -np.dot(np.diag(r), one) + pair.sum()
    return e, d1, d2


def gap_derivatives(spec, grid, chunk: int = 32, workers: int = 1, cond_floor: float | None = None):
    """E, E' and E'' on a grid, from the trace identities for log det(I - A).

    (log E)' = -tr[(I-A)^-1 A'],  (log E)'' = -tr[(I-A)^-1 A''] - tr[((I-A)^-1 A')^2],
    evaluated in the eigenbasis of I - A. Near-singular points (s close to N)
    switch to division-free leave-out products; pass ``cond_floor`` to get a
    ConditioningError there instead.
    """
    n = _dim(spec)
    grid = _check_domain(n, grid)
    blocks = [grid[i : i + chunk] for i in range(0, len(grid), chunk)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _derivs_block(n, b, cond_floor), blocks))
    else:
        parts = [_derivs_block(n, b, cond_floor) for b in blocks]
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(3))


def spacing_density(spec, grid=DEFAULT_GRID, workers: int = 1, cond_floor: float | None = None) -> SpacingCurve:
    """Nearest-neighbour spacing density p_N(s) = E''(s) on ``grid``."""
    n = _dim(spec)
    grid = np.asarray(grid, dtype=float)
    if grid.size and grid.max() > min(n, 8):
        raise DomainError(f"grid must lie within [0, min(N, 8)] = [0, {min(n, 8)}]")
    _, _, p = gap_derivatives(n, grid, workers=workers, cond_floor=cond_floor)
    if np.any(p < -NEGATIVE_TOL):
        bad = grid[np.argmin(p)]
        raise ConditioningError(f"spacing density negative beyond tolerance at s = {bad}", s=float(bad))
    step = float(np.min(np.diff(grid))) if grid.size > 1 else 0.0
    return SpacingCurve(
        grid, p, kind="p_finite_n",
        meta={"N": n, "grid_step": step, "error_estimate": 1e-12, "normalization_tol": 1e-6},
    )


def spacing_cdf(spec, s):
    """P(spacing <= s) = 1 + E'(s); exact bin probabilities come from its differences."""
    n = _dim(spec)
    _, d1, _ = gap_derivatives(n, np.atleast_1d(np.asarray(s, dtype=float)))
    out = 1.0 + d1
    return float(out[0]) if np.ndim(s) == 0 else out


def bin_probabilities(spec, edges):
    """Probability mass of p_N in each bin ``[edges[i], edges[i+1])``; bins beyond N get 0."""
    n = _dim(spec)
    edges = np.asarray(edges, dtype=float)
    clipped = np.minimum(edges, n)
    return np.diff(spacing_cdf(n, clipped))
