"""Zero tables: loading, local unfolding, histograms, pair correlation, residuals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .curves import CorrelationCurve, SpacingCurve
from .errors import DataError, DomainError, FormatError

TWO_PI = 2.0 * math.pi
DEFAULT_BINS = (0.0, 4.0, 80)
DEFAULT_R2_BINS = (0.0, 10.0, 200)


@dataclass
class ZeroDataset:
    """Ascending zero ordinates, stored as ``offset + local`` to keep precision at large heights."""

    local: np.ndarray
    offset: float = 0.0
    window_center: float | None = None
    source: str = ""

    def __post_init__(self):
        self.local = np.asarray(self.local, dtype=float)
        if self.local.size < 2:
            raise DataError("a zero dataset needs at least two ordinates")
        bad = np.flatnonzero(np.diff(self.local) <= 0)
        if bad.size:
            raise DataError(f"ordinates not strictly ascending at index {bad[0] + 1}", line=int(bad[0]) + 2)
        if self.window_center is None:
            self.window_center = self.offset + 0.5 * (self.local[0] + self.local[-1])

    @property
    def ordinates(self) -> np.ndarray:
        return self.offset + self.local

    @property
    def count(self) -> int:
        return int(self.local.size)

    def stats(self) -> dict:
        return {
            "source": self.source,
            "count": self.count,
            "offset": self.offset,
            "first": float(self.ordinates[0]),
            "last": float(self.ordinates[-1]),
            "window_center": float(self.window_center),
        }


@dataclass
class EmpiricalStats:
    spacing_hist: SpacingCurve
    r2_hist: CorrelationCurve | None
    params: object = None
    extra: dict = field(default_factory=dict)


def load_zeros(path, format: str = "plain") -> ZeroDataset:
    """Read a zero table.

    ``plain``: one decimal ordinate per line. ``offset_header``: first line
    ``# offset <decimal>``, then values relative to it. Blank lines are skipped.
    """
    if format not in ("plain", "offset_header"):
        raise ValueError(f"unknown zero-file format {format!r}")
    path = Path(path)
    offset = 0.0
    values = []
    prev = -math.inf
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if format == "offset_header" and lineno == 1:
                parts = line.split()
                if len(parts) != 3 or parts[0] != "#" or parts[1] != "offset":
                    raise FormatError(f"{path}:1: expected '# offset <decimal>'", line=1)
                try:
                    offset = float(parts[2])
                except ValueError:
                    raise FormatError(f"{path}:1: bad offset {parts[2]!r}", line=1) from None
                continue
            if not line:
                continue
            try:
                v = float(line)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: cannot parse {line!r}", line=lineno) from None
            if not math.isfinite(v):
                raise FormatError(f"{path}:{lineno}: non-finite value", line=lineno)
            if v <= prev:
                raise DataError(f"{path}:{lineno}: ordinates not strictly ascending", line=lineno)
            prev = v
            values.append(v)
    if len(values) < 2:
        raise DataError(f"{path}: fewer than two ordinates")
    return ZeroDataset(np.array(values), offset=offset, source=str(path))


def save_zeros(ds_or_ordinates, path, offset: float | None = None):
    """Write ordinates in the plain format, or offset_header when ``offset`` is given."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(ds_or_ordinates, ZeroDataset):
        local, base = ds_or_ordinates.local, ds_or_ordinates.offset
    else:
        local, base = np.asarray(ds_or_ordinates, dtype=float), 0.0
    with path.open("w") as fh:
        if offset is not None:
            fh.write(f"# offset {float(offset)!r}\n")
            local = local + (base - offset)
        else:
            local = local + base
        fh.writelines(f"{v!r}\n" for v in local.tolist())
    return path


def mean_density(t):
    """rho(t) = log(t / 2 pi) / (2 pi)."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= TWO_PI):
        raise DomainError("mean zero density is only positive above t = 2 pi")
    return np.log(t / TWO_PI) / TWO_PI


def unfold(ds: ZeroDataset, local: bool = True) -> np.ndarray:
    """Unfolded spacings (t_{n+1} - t_n) * rho(t_n).

    With ``local=False`` a single density at the window center is used.
    """
    gaps = np.diff(ds.local)
    if local:
        rho = mean_density(ds.ordinates[:-1])
    else:
        rho = float(mean_density(ds.window_center))
    return gaps * rho


def _edges(bins) -> np.ndarray:
    if isinstance(bins, tuple) and len(bins) == 3 and isinstance(bins[2], (int, np.integer)):
        lo, hi, n = bins
        return np.linspace(lo, hi, int(n) + 1)
    edges = np.asarray(bins, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("bin edges must be a strictly ascending 1-d array")
    return edges


def spacing_histogram(spacings, bins=DEFAULT_BINS, kind_meta: dict | None = None) -> SpacingCurve:
    """Density histogram of spacings normalised by the total count, with Poisson errors.

    Empty bins carry value 0 and error 0.
    """
    spacings = np.asarray(spacings, dtype=float)
    if spacings.size < 100:
        raise ValueError(f"need at least 100 spacings, got {spacings.size}")
    edges = _edges(bins)
    counts, _ = np.histogram(spacings, bins=edges)
    width = np.diff(edges)
    total = spacings.size
    meta = {
        "edges": edges.tolist(),
        "count": int(total),
        "outside_fraction": float(1.0 - counts.sum() / total),
        "mean_spacing": float(spacings.mean()),
        **(kind_meta or {}),
    }
    centers = 0.5 * (edges[1:] + edges[:-1])
    return SpacingCurve(centers, counts / (total * width), np.sqrt(counts) / (total * width),
                        meta=meta, kind="empirical")


def _pair_counts(x: np.ndarray, edges: np.ndarray):
    smax = edges[-1]
    anchors = int(np.searchsorted(x, x[-1] - smax, side="right"))
    if anchors == 0:
        raise ValueError("window is shorter than the maximal pair separation")
    counts = np.zeros(len(edges) - 1)
    lag = 1
    while lag < len(x):
        d = x[lag : lag + anchors] - x[:anchors][: len(x) - lag]
        if d.size == 0 or d.min() > smax:
            break
        counts += np.histogram(d, bins=edges)[0]
        lag += 1
    return counts, anchors


def _as_spacings(data) -> np.ndarray:
    return unfold(data) if isinstance(data, ZeroDataset) else np.asarray(data, dtype=float)


def empirical_r2(data, params=None, bins=DEFAULT_R2_BINS) -> CorrelationCurve:
    """Pair-counting estimate of R2 on unfolded positions.

    Every point at least ``max(bins)`` before the end of the window is an
    anchor; R2 in a bin is (pairs) / (anchors * width), which tends to 1 for
    an uncorrelated sequence of unit density. ``data`` is a dataset, an
    array of spacings, or a list of either for independent windows (pairs
    are never formed across windows). With 30 or more windows the error
    bars come from the spread of per-window counts (pairs within a window
    are correlated, so Poisson errors run low); otherwise they are Poisson.
    """
    segments = list(data) if isinstance(data, list) else [data]
    spacings = [_as_spacings(seg) for seg in segments]
    if sum(sp.size + 1 for sp in spacings) < 1000:
        raise ValueError("need at least 1000 points for a pair-correlation estimate")
    edges = _edges(bins)
    per_window, per_anchor = [], []
    for sp in spacings:
        x = np.concatenate([[0.0], np.cumsum(sp)])
        if x[-1] <= edges[-1]:
            continue
        c, a = _pair_counts(x, edges)
        per_window.append(c)
        per_anchor.append(a)
    if not per_window:
        raise ValueError("every window is shorter than the maximal pair separation")
    per_window = np.array(per_window)
    per_anchor = np.array(per_anchor, dtype=float)
    counts = per_window.sum(axis=0)
    anchors = int(per_anchor.sum())
    width = np.diff(edges)
    if len(per_anchor) >= 30:
        ratio = counts / anchors
        spread = np.sqrt(np.sum((per_window - np.outer(per_anchor, ratio)) ** 2, axis=0))
        errors = spread / (anchors * width)
    else:
        errors = np.sqrt(counts) / (anchors * width)
    meta = {"edges": edges.tolist(), "anchors": anchors, "windows": len(per_anchor)}
    if params is not None and hasattr(params, "to_dict"):
        meta["params"] = {k: v for k, v in params.to_dict().items() if k != "constants"}
    centers = 0.5 * (edges[1:] + edges[:-1])
    return CorrelationCurve(centers, counts / (anchors * width), errors, meta=meta, origin="empirical")


def bin_average(curve, edges) -> np.ndarray:
    """Average of a smooth sampled curve over each bin, via its cubic-spline antiderivative."""
    edges = np.asarray(edges, dtype=float)
    if edges[0] < curve.grid[0] - 1e-12 or edges[-1] > curve.grid[-1] + 1e-12:
        raise DomainError(
            f"curve spans [{curve.grid[0]}, {curve.grid[-1]}] but bins span [{edges[0]}, {edges[-1]}]"
        )
    anti = CubicSpline(curve.grid, curve.values).antiderivative()
    return np.diff(anti(edges)) / np.diff(edges)


def residuals(empirical, predicted: SpacingCurve) -> SpacingCurve:
    """Empirical histogram minus the bin-averaged prediction, with combined error bars."""
    hist = empirical.spacing_hist if isinstance(empirical, EmpiricalStats) else empirical
    edges = np.asarray(hist.meta["edges"], dtype=float)
    pred = bin_average(predicted, edges)
    pred_err = float(predicted.meta.get("error_estimate", 0.0))
    err = np.sqrt(hist.error_column() ** 2 + pred_err**2)
    return SpacingCurve(hist.grid, hist.values - pred, err, kind="delta_p",
                        meta={"edges": edges.tolist(), "role": "residual", "count": hist.meta.get("count")})


def rms(curve: SpacingCurve) -> float:
    return float(np.sqrt(np.mean(curve.values**2)))


def analyze(ds: ZeroDataset, params=None, bins=DEFAULT_BINS, r2_bins=DEFAULT_R2_BINS) -> EmpiricalStats:
    spacings = unfold(ds)
    hist = spacing_histogram(spacings, bins, {"dataset": ds.stats()})
    r2 = empirical_r2(spacings, params, r2_bins) if spacings.size + 1 >= 1000 else None
    return EmpiricalStats(hist, r2, params, {"mean_spacing": float(spacings.mean())})
