"""Richardson extraction of p_0 and p_1 from p_N = p_0 + p_1/N^2 + O(N^-4)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cue import DEFAULT_GRID, spacing_density
from .curves import SpacingCurve

DEFAULT_N_SEQUENCE = (16, 32, 64, 128)
CONSISTENCY_WINDOW = (0.0, 3.0)


@dataclass
class ExtractionReport:
    p0: SpacingCurve
    p1: SpacingCurve
    n_sequence: list
    consistency_error: float

    def manifest(self) -> dict:
        return {
            "n_sequence": list(self.n_sequence),
            "consistency_error": self.consistency_error,
            "consistency_window": list(CONSISTENCY_WINDOW),
        }


def _validate(n_sequence, minimum: int = 2):
    ns = [int(n) for n in n_sequence]
    if len(ns) < minimum:
        raise ValueError(f"need at least {minimum} matrix sizes, got {ns}")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_sequence must be strictly ascending")
    if ns[0] < 8:
        raise ValueError("matrix sizes must be >= 8")
    return ns


def richardson_coefficients(ns, values) -> np.ndarray:
    """Fit values[k] = sum_j a_j / N_k^(2j) exactly through all points.

    ``values`` has shape (len(ns), G); returns a with shape (len(ns), G).
    Lagrange-form polynomial interpolation in h = (N_0/N)^2.
    """
    ns = np.asarray(ns, dtype=float)
    h = (ns[0] / ns) ** 2
    V = np.vander(h, increasing=True)
    coeffs = np.linalg.solve(V, np.asarray(values, dtype=float))
    scale = ns[0] ** (2 * np.arange(len(ns)))
    return coeffs * scale[:, None]


def finite_n_densities(n_sequence, grid=DEFAULT_GRID, workers: int = 1) -> np.ndarray:
    return np.array([spacing_density(n, grid, workers=workers).values for n in n_sequence])


def _sup(diff, grid, window=CONSISTENCY_WINDOW):
    mask = (grid >= window[0] - 1e-12) & (grid <= window[1] + 1e-12)
    return float(np.max(np.abs(diff[mask]))) if mask.any() else float(np.max(np.abs(diff)))


def extract_p0(n_sequence, grid=DEFAULT_GRID, densities=None, workers: int = 1) -> SpacingCurve:
    """Asymptotic spacing density by Richardson elimination in 1/N^2.

    For two sizes (N, 2N) this is (4 p_2N - p_N)/3; more sizes eliminate
    higher even powers as well.
    """
    ns = _validate(n_sequence)
    grid = np.asarray(grid, dtype=float)
    if densities is None:
        densities = finite_n_densities(ns, grid, workers)
    a = richardson_coefficients(ns, densities)
    residual = np.abs(a[0] - richardson_coefficients(ns[1:], densities[1:])[0]) if len(ns) > 2 else None
    err = _sup(residual, grid) if residual is not None else float(np.max(np.abs(a[0] - densities[-1])))
    return SpacingCurve(grid, a[0], kind="p_asymptotic",
                        meta={"n_sequence": ns, "error_estimate": err, "normalization_tol": 1e-6})


def extract_p1(n_sequence=DEFAULT_N_SEQUENCE, grid=DEFAULT_GRID, densities=None, workers: int = 1) -> ExtractionReport:
    """p_0 and the first correction p_1 = lim N^2 (p_N - p_0).

    The consistency error is the sup-norm difference, over s in [0, 3], of the
    p_1 estimate from the full sequence and from the sequence without its
    smallest N. With only two sizes it falls back to |N^2 (p_N - p_0) - p_1|
    at the largest N.
    """
    ns = _validate(n_sequence)
    grid = np.asarray(grid, dtype=float)
    if densities is None:
        densities = finite_n_densities(ns, grid, workers)
    a = richardson_coefficients(ns, densities)
    p0, p1 = a[0], a[1]
    if len(ns) > 2:
        other = richardson_coefficients(ns[1:], densities[1:])[1]
    else:
        other = ns[-1] ** 2 * (densities[-1] - p0)
    consistency = _sup(p1 - other, grid)
    p0_curve = extract_p0(ns, grid, densities=densities)
    p1_curve = SpacingCurve(grid, p1, kind="p1_correction",
                            meta={"n_sequence": ns, "error_estimate": consistency, "normalization_tol": 1e-3})
    return ExtractionReport(p0_curve, p1_curve, ns, consistency)
