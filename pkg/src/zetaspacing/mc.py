"""Monte Carlo CUE_N: Haar unitaries, eigenphase spacings and pair correlations."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curves import CorrelationCurve, SpacingCurve
from .zeros import DEFAULT_BINS, ZeroDataset, _edges, mean_density, save_zeros, spacing_histogram

BLOCK = 10_000
GENERATOR = "numpy.random.Philox (SeedSequence spawn per block)"
UNITARITY_TOL = 1e-8


@dataclass
class McRun:
    n: int
    samples: int
    seed: int
    spacings: np.ndarray
    phases: np.ndarray | None = None
    phase_correction: bool = True

    def manifest(self) -> dict:
        return {
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "block": BLOCK,
            "generator": GENERATOR,
            "phase_correction": self.phase_correction,
            "mean_spacing": float(self.spacings.mean()),
        }

    def save_manifest(self, path):
        Path(path).write_text(json.dumps(self.manifest(), indent=2))


def haar_unitary(n: int, size: int, rng: np.random.Generator, phase_correction: bool = True) -> np.ndarray:
    """Stack of ``size`` n x n unitaries from QR of complex Ginibre matrices.

    The phase correction rescales each column of Q by the phase of the
    corresponding diagonal entry of R; without it the law is not Haar.
    """
    z = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    if phase_correction:
        d = np.diagonal(r, axis1=-2, axis2=-1)
        q = q * (d / np.abs(d))[:, None, :]
    return q


def _block(n, size, seed_seq, phase_correction):
    rng = np.random.Generator(np.random.Philox(seed_seq))
    ev = np.linalg.eigvals(haar_unitary(n, size, rng, phase_correction))
    if np.max(np.abs(np.abs(ev) - 1.0)) > UNITARITY_TOL:
        raise ArithmeticError("eigenvalue off the unit circle beyond tolerance")
    return np.sort(np.mod(np.angle(ev), 2.0 * math.pi), axis=-1)


def sample_phases(n: int, samples: int, seed: int, phase_correction: bool = True, workers: int = 1) -> np.ndarray:
    """Sorted eigenphases in [0, 2 pi), shape (samples, n); deterministic in ``seed``."""
    if int(n) != n or n < 2:
        raise ValueError(f"matrix dimension must be an integer >= 2, got {n}")
    if int(samples) != samples or samples < 1:
        raise ValueError(f"samples must be a positive integer, got {samples}")
    sizes = [min(BLOCK, samples - i) for i in range(0, samples, BLOCK)]
    seqs = np.random.SeedSequence(int(seed)).spawn(len(sizes))
    jobs = [(n, size, sq, phase_correction) for size, sq in zip(sizes, seqs)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda j: _block(*j), jobs))
    else:
        blocks = [_block(*j) for j in jobs]
    return np.concatenate(blocks)


def phase_spacings(phases: np.ndarray) -> np.ndarray:
    """Circular nearest-neighbour gaps, unfolded by N / 2 pi; N per sample."""
    n = phases.shape[-1]
    gaps = np.diff(phases, axis=-1, append=phases[:, :1] + 2.0 * math.pi)
    return (gaps * n / (2.0 * math.pi)).ravel()


def sample_cue(n: int, samples: int, seed: int, phase_correction: bool = True,
               keep_phases: bool = False, workers: int = 1) -> McRun:
    phases = sample_phases(n, samples, seed, phase_correction, workers)
    return McRun(int(n), int(samples), int(seed), phase_spacings(phases),
                 phases if keep_phases else None, phase_correction)


def mc_spacing_curve(run: McRun, bins=DEFAULT_BINS) -> SpacingCurve:
    return spacing_histogram(run.spacings, bins, {"mc": run.manifest()})


def circular_r2(phases: np.ndarray, bins=(0.0, 4.0, 80)) -> CorrelationCurve:
    """R2 from all ordered pairs within each sample, distances taken around the circle."""
    samples, n = phases.shape
    edges = _edges(bins)
    counts = np.zeros(len(edges) - 1)
    scale = n / (2.0 * math.pi)
    for shift in range(1, n):
        d = np.mod(np.roll(phases, -shift, axis=1) - phases, 2.0 * math.pi) * scale
        counts += np.histogram(d, bins=edges)[0]
    width = np.diff(edges)
    norm = samples * n * width
    centers = 0.5 * (edges[1:] + edges[:-1])
    return CorrelationCurve(centers, counts / norm, np.sqrt(counts) / norm,
                            meta={"edges": edges.tolist(), "N": n, "samples": samples}, origin="empirical")


def spacings_to_ordinates(spacings, start: float = 1.0e6, tol: float = 1e-13) -> np.ndarray:
    """Invert local unfolding: t_{k+1} = t_k + s_k / rho(t_k), with t_0 = ``start``.

    Returned values are relative to ``start``. The recursion is solved as a
    fixed point of the cumulative sum; rho varies so slowly that a handful of
    sweeps reach ``tol``.
    """
    spacings = np.asarray(spacings, dtype=float)
    local = np.zeros(spacings.size + 1)
    for _ in range(50):
        nxt = np.concatenate([[0.0], np.cumsum(spacings / mean_density(start + local[:-1]))])
        done = np.max(np.abs(nxt - local)) <= tol * max(1.0, nxt[-1])
        local = nxt
        if done:
            break
    else:
        raise ArithmeticError("ordinate reconstruction did not converge")
    return local


def as_zero_dataset(run: McRun, start: float = 1.0e6) -> ZeroDataset:
    """MC spacings as a synthetic zero window starting at height ``start``."""
    return ZeroDataset(spacings_to_ordinates(run.spacings, start), offset=start, source=f"mc:N={run.n}")


def export_as_zeros(run: McRun, path, start: float = 1.0e6, format: str = "plain"):
    """Write MC spacings as a zero table (plain or offset_header) for the ``zeros`` pipeline."""
    ds = as_zero_dataset(run, start)
    return save_zeros(ds, path, offset=start if format == "offset_header" else None)
