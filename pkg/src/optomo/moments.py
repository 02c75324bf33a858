"""Means and dispersions extracted from tomogram rows.

Moments on stored grids use Simpson's rule; moments taken directly from a
state bypass the stored grid through a dedicated fine row, so estimator
accuracy is not tied to grid resolution.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import simpson

from .errors import InputError, NumericalError, TruncationWarning
from .states import MomentSet, State, grid_halfwidth
from .tomography import TomogramGrid, _state_row

__all__ = [
    "row_mean",
    "row_variance",
    "tomographic_mean",
    "tomographic_variance",
    "tomographic_moments",
    "moments_from_state",
]

NORM_TOL = 1e-6
TAIL_TOL = 1e-6


def _checked(xs, row, norm_tol):
    xs = np.asarray(xs, dtype=float)
    row = np.asarray(row, dtype=float)
    if xs.ndim != 1 or xs.shape != row.shape or xs.size < 3:
        raise InputError("row and x grid must be matching 1-D arrays (>= 3 points)")
    mass = float(np.trapezoid(row, xs))
    if abs(mass - 1.0) > norm_tol:
        raise InputError(
            f"row integrates to {mass:.8f}, outside 1 +/- {norm_tol}; "
            "normalize it before taking moments"
        )
    return xs, row


def row_mean(xs, row, *, norm_tol: float = NORM_TOL) -> float:
    """integral w(X) X dX over the grid (Simpson)."""
    xs, row = _checked(xs, row, norm_tol)
    return float(simpson(row * xs, x=xs))


def row_variance(xs, row, *, norm_tol: float = NORM_TOL) -> float:
    """integral w X^2 dX - (integral w X dX)^2, with a window-coverage guard."""
    xs, row = _checked(xs, row, norm_tol)
    mean = float(simpson(row * xs, x=xs))
    var = float(simpson(row * xs * xs, x=xs)) - mean * mean
    var = max(var, 0.0)
    sigma = math.sqrt(var)
    if mean - 6.0 * sigma < xs[0] or mean + 6.0 * sigma > xs[-1]:
        tail_estimate = (float(row[0]) + float(row[-1])) * max(sigma, 1e-3)
        if tail_estimate > TAIL_TOL:
            raise NumericalError(
                f"grid window [{xs[0]:.4g}, {xs[-1]:.4g}] is narrower than 6 sigma "
                f"around mean {mean:.4g} and the boundary tail estimate "
                f"{tail_estimate:.3g} exceeds {TAIL_TOL}"
            )
        warnings.warn(
            f"grid window is narrower than 6 sigma around mean {mean:.4g}; "
            "variance may be slightly truncated",
            TruncationWarning,
            stacklevel=2,
        )
    return var


def tomographic_mean(grid: TomogramGrid, phase: float, *, norm_tol: float = NORM_TOL) -> float:
    row, mirrored = grid.row_at(phase)
    mean = row_mean(grid.xs, row, norm_tol=norm_tol)
    return -mean if mirrored else mean


def tomographic_variance(grid: TomogramGrid, phase: float, *, norm_tol: float = NORM_TOL) -> float:
    row, _ = grid.row_at(phase)  # variance is invariant under X -> -X
    return row_variance(grid.xs, row, norm_tol=norm_tol)


def tomographic_moments(grid: TomogramGrid, phase: float, *, norm_tol: float = NORM_TOL) -> MomentSet:
    return MomentSet(
        tomographic_mean(grid, phase, norm_tol=norm_tol),
        tomographic_variance(grid, phase, norm_tol=norm_tol),
        float(phase),
    )


def moments_from_state(state: State, phase: float, *, n_x: int = 2049) -> MomentSet:
    """Tomographic moments from a dedicated fine row, independent of any grid."""
    half = grid_halfwidth(state)
    xs = np.linspace(-half, half, n_x)
    row = _state_row(state, phase, xs)
    return MomentSet(row_mean(xs, row), row_variance(xs, row), float(phase))
