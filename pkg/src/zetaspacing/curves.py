"""Sampled curves and their CSV + JSON-sidecar serialization."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SPACING_KINDS = ("p_finite_n", "p_asymptotic", "p1_correction", "delta_p", "empirical")
CORRELATION_ORIGINS = ("cue_exact", "cue_expansion", "prime_full", "prime_expansion", "empirical")


def _as_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d array")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending")
    return grid


@dataclass
class _Curve:
    grid: np.ndarray
    values: np.ndarray
    errors: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = _as_grid(self.grid)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError("values and grid differ in shape")
        if self.errors is not None:
            self.errors = np.asarray(self.errors, dtype=float)
            if self.errors.shape != self.grid.shape:
                raise ValueError("errors and grid differ in shape")

    def integral(self, lo: float | None = None, hi: float | None = None, weight=None) -> float:
        """Trapezoid integral of ``weight(s) * values`` over ``[lo, hi]`` (grid points only)."""
        mask = np.ones(self.grid.shape, dtype=bool)
        if lo is not None:
            mask &= self.grid >= lo - 1e-12
        if hi is not None:
            mask &= self.grid <= hi + 1e-12
        s, v = self.grid[mask], self.values[mask]
        if weight is not None:
            v = v * weight(s)
        return float(np.trapezoid(v, s))

    def error_column(self) -> np.ndarray:
        if self.errors is None:
            return np.full(self.grid.shape, float(self.meta.get("error_estimate", 0.0)))
        return self.errors

    def _header(self) -> dict:
        raise NotImplementedError

    def to_csv(self, path) -> tuple[Path, Path]:
        """Write ``s,value,error_estimate`` rows plus a JSON metadata sidecar.

        Floats are written with ``repr`` so they round-trip exactly.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["s", "value", "error_estimate"])
            for s, v, e in zip(self.grid, self.values, self.error_column()):
                writer.writerow([repr(float(s)), repr(float(v)), repr(float(e))])
        sidecar = path.with_suffix(".json")
        sidecar.write_text(json.dumps({**self._header(), "meta": _jsonable(self.meta)}, indent=2))
        return path, sidecar

    @classmethod
    def _read(cls, path):
        path = Path(path)
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        header = json.loads(path.with_suffix(".json").read_text())
        return rows, header


@dataclass
class SpacingCurve(_Curve):
    """Spacing density sampled on an unfolded s-grid (mean spacing 1)."""

    kind: str = "p_finite_n"

    def __post_init__(self):
        super().__post_init__()
        if self.kind not in SPACING_KINDS:
            raise ValueError(f"unknown spacing kind {self.kind!r}")

    def _header(self):
        return {"type": "SpacingCurve", "kind": self.kind}

    @classmethod
    def from_csv(cls, path) -> "SpacingCurve":
        rows, header = cls._read(path)
        return cls(rows[:, 0], rows[:, 1], rows[:, 2], header.get("meta", {}), kind=header["kind"])


@dataclass
class CorrelationCurve(_Curve):
    """Two-point correlation R2(s) on an unfolded grid."""

    origin: str = "cue_exact"

    def __post_init__(self):
        super().__post_init__()
        if self.origin not in CORRELATION_ORIGINS:
            raise ValueError(f"unknown correlation origin {self.origin!r}")

    def _header(self):
        return {"type": "CorrelationCurve", "origin": self.origin}

    @classmethod
    def from_csv(cls, path) -> "CorrelationCurve":
        rows, header = cls._read(path)
        return cls(rows[:, 0], rows[:, 1], rows[:, 2], header.get("meta", {}), origin=header["origin"])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def parse_grid(text: str) -> np.ndarray:
    """Parse ``"min:max:step"`` into an inclusive grid."""
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise ValueError(f"grid must look like min:max:step, got {text!r}") from exc
    if step <= 0 or hi <= lo:
        raise ValueError(f"bad grid {text!r}")
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)
