"""Finite-height spacing prediction: effective dimension, rescaling, and delta p."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .primecorr import HeightContext, alpha_of
from .constants import ConstantSet
from .curves import SpacingCurve
from .errors import DomainError


@dataclass(frozen=True)
class PredictionParams:
    ctx: HeightContext
    n_eff: float
    alpha: float
    constants_used: ConstantSet

    @property
    def n0(self) -> float:
        return self.ctx.n0

    def to_dict(self) -> dict:
        return {
            "e_height": self.ctx.e_height,
            "rho_bar": self.ctx.rho_bar,
            "n0": self.ctx.n0,
            "n_eff": self.n_eff,
            "alpha": self.alpha,
            "n_eff_over_n0": self.n_eff / self.ctx.n0,
            "constants": self.constants_used.to_dict(),
        }


def derive_params(e_height: float, constants: ConstantSet) -> PredictionParams:
    """N_0 = log(E/2pi), N_eff = N_0 / sqrt(12 Lambda), alpha = 1 + C/N_0."""
    ctx = HeightContext.at(e_height)
    n_eff = ctx.n0 / math.sqrt(12.0 * constants.lam)
    return PredictionParams(ctx, n_eff, alpha_of(ctx, constants), constants)


def _spline(p1: SpacingCurve) -> CubicSpline:
    return CubicSpline(p1.grid, p1.values, bc_type="natural")


def delta_p(params: PredictionParams, p1: SpacingCurve, grid, no_rescale: bool = False) -> SpacingCurve:
    """delta p(s) = p_1(alpha s) / N_eff^2, or p_1(s) / N_eff^2 with ``no_rescale``."""
    if p1.kind != "p1_correction":
        raise ValueError(f"expected a p1_correction curve, got {p1.kind!r}")
    grid = np.asarray(grid, dtype=float)
    alpha = 1.0 if no_rescale else params.alpha
    arg = alpha * grid
    lo, hi = p1.grid[0], p1.grid[-1]
    if arg.min() < lo - 1e-12 or arg.max() > hi + 1e-12:
        raise DomainError(f"alpha*s spans [{arg.min():.4g}, {arg.max():.4g}], outside the p1 grid [{lo}, {hi}]")
    values = _spline(p1)(np.clip(arg, lo, hi)) / params.n_eff**2
    return SpacingCurve(
        grid, values, kind="delta_p",
        meta={"e_height": params.ctx.e_height, "n_eff": params.n_eff, "alpha": alpha,
              "rescaled": not no_rescale, "error_estimate": p1.meta.get("error_estimate", 0.0) / params.n_eff**2},
    )


def predicted_spacing(params: PredictionParams, p0: SpacingCurve, p1: SpacingCurve, grid,
                      no_rescale: bool = False) -> SpacingCurve:
    """p_0(s) + delta p(s) on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if grid.min() < p0.grid[0] - 1e-12 or grid.max() > p0.grid[-1] + 1e-12:
        raise DomainError("grid extends beyond the p0 curve")
    base = CubicSpline(p0.grid, p0.values, bc_type="natural")(grid)
    dp = delta_p(params, p1, grid, no_rescale)
    return SpacingCurve(grid, base + dp.values, kind="p_finite_n",
                        meta={**dp.meta, "source": "p0 + delta_p", "normalization_tol": 1e-3})


def finite_n_params(n: float, constants: ConstantSet) -> PredictionParams:
    """Parameters that make delta_p equal p_1/N^2 for a plain CUE_N (alpha = 1)."""
    e_height = 2.0 * math.pi * math.exp(n * math.sqrt(12.0 * constants.lam))
    ctx = HeightContext.at(e_height)
    return PredictionParams(ctx, float(n), 1.0, constants)
