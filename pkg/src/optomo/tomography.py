"""Optical tomograms: quadrature distributions w(X, theta) of photon states.

A row at local-oscillator phase theta is computed from the oscillatory
transform of the wavefunction,

    w(X, theta) = |integral Psi(y) exp(i y^2 cot(theta)/2 - i X y / sin(theta)) dy|^2
                  / (2 pi |sin theta|),

evaluated over the position wavefunction when |sin| >= |cos| and over the
momentum wavefunction otherwise (the same transform shifted by pi/2), which
keeps the kernel bounded at every phase.  At the exact endpoints the rows are
the position/momentum marginals |Psi(X)|^2 and |Psi~(X)|^2.

Phases are stored on [0, pi); any other phase is reached through the parity
rule w(X, theta + pi) = w(-X, theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Real

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from . import kernels, quadrature
from .errors import ExtrapolationError, InputError, ResolutionError
from .states import (
    FockSuperposition,
    GaussianState,
    MixedState,
    State,
    analytic_moments,
    density_bandwidth,
    eval_momentum_wavefunction,
    eval_position_wavefunction,
    grid_halfwidth,
    quadrature_halfwidth,
)

__all__ = [
    "DEFAULT_N_PHASES",
    "DEFAULT_N_X",
    "TomogramGrid",
    "uniform_phases",
    "wrap_phase",
    "gaussian_row",
    "optical_tomogram",
    "tomogram_grid",
    "tomogram_of_mixed",
    "symplectic_tomogram",
    "tomogram_characteristic",
    "save_tomogram_csv",
    "load_tomogram_csv",
]

DEFAULT_N_PHASES = 64
DEFAULT_N_X = 256
MAX_N_X = 4096
NEGATIVE_TOL = 1e-12
NORM_TOL = 1e-6
PHASE_TOL = 1e-9
_ENDPOINT_EPS = 1e-12


def uniform_phases(n: int) -> np.ndarray:
    """n phases uniformly spaced on [0, pi)."""
    if n < 1:
        raise InputError(f"need at least one phase, got {n}")
    return np.arange(n) * (math.pi / n)


def wrap_phase(phase: float):
    """Map a phase into [0, pi); the flag says the X axis is mirrored there.

    Implements w(X, theta + pi) = w(-X, theta).
    """
    phase = float(phase)
    if not math.isfinite(phase):
        raise InputError("phase must be finite")
    k = math.floor(phase / math.pi)
    reduced = phase - k * math.pi
    if reduced >= math.pi:
        reduced -= math.pi
        k += 1
    return reduced, bool(k % 2)


def gaussian_row(xs, mean: float, variance: float) -> np.ndarray:
    """Normal density on a grid; handy for test rows not derived from any state."""
    xs = np.asarray(xs, dtype=float)
    if variance <= 0:
        raise InputError(f"variance must be > 0, got {variance}")
    return np.exp(-((xs - mean) ** 2) / (2.0 * variance)) / math.sqrt(
        2.0 * math.pi * variance
    )


@dataclass(frozen=True, eq=False)
class TomogramGrid:
    """Sampled tomogram w[theta_index, x_index] on phases x uniform X grid.

    Rows are probability densities: non-negative (values below -1e-12 are
    rejected, small negatives clamped to zero) and trapezoid-normalized to 1
    within 1e-6.  ``source`` optionally carries the originating state spec,
    enabling exact re-evaluation off the grid.
    """

    phases: np.ndarray
    xs: np.ndarray
    values: np.ndarray
    source: object = field(default=None, compare=False)

    def __post_init__(self):
        phases = np.array(self.phases, dtype=float)
        xs = np.array(self.xs, dtype=float)
        values = np.array(self.values, dtype=float)
        if phases.ndim != 1 or phases.size < 1:
            raise InputError("phases must be a non-empty 1-D array")
        if np.any(~np.isfinite(phases)) or phases[0] < 0 or phases[-1] >= math.pi:
            raise InputError("phases must be finite and lie in [0, pi)")
        if np.any(np.diff(phases) <= 0):
            raise InputError("phases must be strictly increasing")
        if xs.ndim != 1 or xs.size < 2:
            raise InputError("x grid needs at least two points")
        steps = np.diff(xs)
        if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
            raise InputError("x grid must be uniform and increasing")
        if values.shape != (phases.size, xs.size):
            raise InputError(
                f"values shape {values.shape} does not match "
                f"({phases.size}, {xs.size})"
            )
        if not np.all(np.isfinite(values)):
            raise InputError("tomogram values must be finite")
        vmin = float(values.min())
        if vmin < -NEGATIVE_TOL:
            raise InputError(f"tomogram values must be >= -{NEGATIVE_TOL}, got {vmin}")
        values = np.maximum(values, 0.0)
        masses = np.trapezoid(values, xs, axis=1)
        bad = np.argmax(np.abs(masses - 1.0))
        if abs(masses[bad] - 1.0) > NORM_TOL:
            raise InputError(
                f"row at phase {phases[bad]:.6g} integrates to {masses[bad]:.8f}, "
                f"outside 1 +/- {NORM_TOL}"
            )
        for arr in (phases, xs, values):
            arr.setflags(write=False)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", values)

    @property
    def n_phases(self) -> int:
        return self.phases.size

    @property
    def n_x(self) -> int:
        return self.xs.size

    @property
    def dx(self) -> float:
        return float(self.xs[1] - self.xs[0])

    def phase_index(self, phase: float, tol: float = PHASE_TOL) -> int:
        """Index of a grid phase, after parity reduction into [0, pi)."""
        reduced, _ = wrap_phase(phase)
        idx = int(np.argmin(np.abs(self.phases - reduced)))
        if abs(self.phases[idx] - reduced) > tol:
            raise InputError(
                f"phase {phase:.9g} (reduced {reduced:.9g}) is not on the grid; "
                f"nearest stored phase is {self.phases[idx]:.9g}"
            )
        return idx

    def row(self, phase: float) -> np.ndarray:
        return self.values[self.phase_index(phase)]

    def row_at(self, phase: float):
        """(row, mirrored) for any real phase; mirrored means the density at
        the query phase is row evaluated at -X."""
        reduced, mirrored = wrap_phase(phase)
        return self.values[self.phase_index(reduced)], mirrored


# --------------------------------------------------------------------------
# row evaluation
# --------------------------------------------------------------------------

def _is_uniform(xs):
    if xs.size < 4:
        return False
    steps = np.diff(xs)
    return bool(np.allclose(steps, steps[0], rtol=1e-12, atol=0.0))


def _pure_row(state, theta, xs, *, branch=None, closed_endpoints=True, quad_tol=1e-11):
    """Tomogram row of a pure state at theta in [0, pi) on arbitrary X points."""
    st, ct = math.sin(theta), math.cos(theta)
    if branch is None and closed_endpoints:
        if abs(st) < _ENDPOINT_EPS:
            amp = eval_position_wavefunction(state, xs)
            return np.abs(np.atleast_1d(amp)) ** 2
        if abs(ct) < _ENDPOINT_EPS:
            amp = eval_momentum_wavefunction(state, xs)
            return np.abs(np.atleast_1d(amp)) ** 2

    use_position = abs(st) >= abs(ct) if branch is None else branch == "position"
    if use_position:
        if abs(st) < _ENDPOINT_EPS:
            raise InputError("position-representation branch is singular at theta = 0")
        chirp = ct / (2.0 * st)
        freq = 1.0 / st
        prefactor = 1.0 / (2.0 * math.pi * abs(st))
        wavefunction = eval_position_wavefunction
    else:
        if abs(ct) < _ENDPOINT_EPS:
            raise InputError(
                "momentum-representation branch is singular at theta = pi/2"
            )
        chirp = -st / (2.0 * ct)
        freq = -1.0 / ct
        prefactor = 1.0 / (2.0 * math.pi * abs(ct))
        wavefunction = eval_momentum_wavefunction

    halfwidth = quadrature_halfwidth(state)
    while halfwidth < 1024.0:
        edge = abs(wavefunction(state, -halfwidth)) ** 2 + abs(
            wavefunction(state, halfwidth)
        ) ** 2
        if edge * halfwidth < 1e-12:
            break
        halfwidth *= 2.0

    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    x_extent = max(abs(float(xs[0])), abs(float(xs[-1])), 1.0)
    state_rate = (
        2.0 * math.sqrt(2.0 * state.cutoff + 1.0)
        if isinstance(state, FockSuperposition)
        else 2.0
    )
    total_phase = (
        abs(chirp) * halfwidth ** 2
        + abs(freq) * x_extent * halfwidth
        + state_rate * halfwidth
    )
    n0 = quadrature.pow2_at_least(max(128.0, total_phase / 2.0))

    uniform = _is_uniform(xs)
    x0 = float(xs[0])
    dx = float(xs[1] - xs[0]) if xs.size > 1 else 1.0

    def estimate(y, wts):
        g = wavefunction(state, y) * np.exp(1j * chirp * y * y) * wts
        if uniform:
            amp = kernels.amplitude_rows_uniform(g, y, freq, x0, dx, xs.size)
        else:
            amp = kernels.amplitude_rows(g, y, freq, xs)
        return (amp.real ** 2 + amp.imag ** 2) * prefactor

    return quadrature.adaptive(
        estimate,
        -halfwidth,
        halfwidth,
        n0=n0,
        tol=quad_tol,
        label=f"tomogram row at theta={theta:.6g}",
    )


def optical_tomogram(
    state,
    phase: float,
    xs,
    *,
    branch: str | None = None,
    closed_endpoints: bool = True,
    quad_tol: float = 1e-11,
) -> np.ndarray:
    """One tomogram row w(X, phase) of a pure state on the given X points.

    ``branch`` forces the "position" or "momentum" evaluation path (both are
    valid wherever non-singular); by default the better-conditioned one is
    used and the exact marginals are returned at theta = 0 and pi/2.
    """
    if not isinstance(state, (GaussianState, FockSuperposition)):
        raise InputError(f"expected a pure state, got {type(state).__name__}")
    if branch not in (None, "position", "momentum"):
        raise InputError(f"branch must be 'position' or 'momentum', got {branch!r}")
    pts = np.atleast_1d(np.asarray(xs, dtype=float))
    if not np.all(np.isfinite(pts)):
        raise InputError("x points must be finite")
    reduced, mirrored = wrap_phase(phase)
    eval_pts = -pts if mirrored else pts
    return _pure_row(
        state,
        reduced,
        eval_pts,
        branch=branch,
        closed_endpoints=closed_endpoints,
        quad_tol=quad_tol,
    )


def _state_row(state, phase, xs, **kw):
    if isinstance(state, MixedState):
        total = np.zeros(np.atleast_1d(xs).shape, dtype=float)
        for w, comp in state.components:
            total += w * optical_tomogram(comp, phase, xs, **kw)
        return total
    return optical_tomogram(state, phase, xs, **kw)


def _resolve_phases(phases):
    if isinstance(phases, int):
        return uniform_phases(phases)
    arr = np.asarray(phases, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise InputError("phases must be an integer count or a 1-D list")
    return arr


def default_n_x(state, window, requested=None):
    """X-point count: the 256-point default, raised when the state's densities
    oscillate too fast for it (trapezoid sums on rows stay spectrally exact)."""
    if requested is not None:
        if requested < 2:
            raise InputError(f"n_x must be >= 2, got {requested}")
        return int(requested)
    width = window[1] - window[0]
    needed = width * density_bandwidth(state) / math.pi * 1.25
    return min(MAX_N_X, max(DEFAULT_N_X, quadrature.pow2_at_least(needed)))


def tomogram_grid(
    state: State,
    phases=DEFAULT_N_PHASES,
    n_x: int | None = None,
    window=None,
    *,
    quad_tol: float = 1e-11,
) -> TomogramGrid:
    """Compute a full tomogram grid for a pure or mixed state.

    ``phases`` is either a count (uniform on [0, pi)) or an explicit list;
    ``window`` defaults to the symmetric 8-sigma window of the state.
    """
    if not isinstance(state, (GaussianState, FockSuperposition, MixedState)):
        raise InputError(f"expected a state, got {type(state).__name__}")
    phase_arr = _resolve_phases(phases)
    if window is None:
        half = grid_halfwidth(state)
        window = (-half, half)
    lo, hi = float(window[0]), float(window[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise InputError(f"invalid window {window!r}")
    xs = np.linspace(lo, hi, default_n_x(state, (lo, hi), n_x))
    values = np.empty((phase_arr.size, xs.size))
    for i, theta in enumerate(phase_arr):
        values[i] = _state_row(state, float(theta), xs, quad_tol=quad_tol)
    return TomogramGrid(phase_arr, xs, values, source=state)


def tomogram_of_mixed(
    state: MixedState,
    phases=DEFAULT_N_PHASES,
    n_x: int | None = None,
    window=None,
    **kw,
) -> TomogramGrid:
    """Tomogram grid of a convex mixture (weighted sum of component rows)."""
    if not isinstance(state, MixedState):
        raise InputError(f"expected a mixed state, got {type(state).__name__}")
    return tomogram_grid(state, phases, n_x, window, **kw)


# --------------------------------------------------------------------------
# symplectic (scaled) tomogram
# --------------------------------------------------------------------------

def symplectic_tomogram(
    grid: TomogramGrid, x: float, mu: float, nu: float, *, exact: bool | None = None
) -> float:
    """w(x, mu, nu) = (1/r) w_opt(x/r, angle(mu, nu)) with r = hypot(mu, nu).

    The angle is mapped into [0, pi) through the parity rule.  With a source
    state attached the row value is re-evaluated exactly; otherwise the stored
    grid is linearly interpolated in X using the nearest stored phase.
    """
    for name, v in (("x", x), ("mu", mu), ("nu", nu)):
        if isinstance(v, bool) or not isinstance(v, Real) or not math.isfinite(v):
            raise InputError(f"{name} must be a finite real number, got {v!r}")
    if mu == 0.0 and nu == 0.0:
        raise InputError("(mu, nu) = (0, 0) is not a valid quadrature direction")
    r = math.hypot(mu, nu)
    angle = math.atan2(nu, mu)
    mirrored = False
    if angle < 0.0:
        angle += math.pi
        mirrored = True
    if angle >= math.pi:
        angle -= math.pi
        mirrored = not mirrored
    u = x / r
    if mirrored:
        u = -u

    if exact is None:
        exact = grid.source is not None
    if exact:
        if grid.source is None:
            raise InputError("exact evaluation requires a grid with a source state")
        val = float(_state_row(grid.source, angle, np.array([u]))[0])
        return val / r

    # nearest stored phase on the pi-circle; crossing pi mirrors once more
    direct = np.abs(grid.phases - angle)
    wrapped = math.pi - direct
    j_direct = int(np.argmin(direct))
    j_wrapped = int(np.argmin(wrapped))
    if direct[j_direct] <= wrapped[j_wrapped]:
        j = j_direct
    else:
        j = j_wrapped
        u = -u
    xs = grid.xs
    if u < xs[0] or u > xs[-1]:
        raise ExtrapolationError(
            f"scaled quadrature x/r = {u:.6g} falls outside the stored grid "
            f"[{xs[0]:.6g}, {xs[-1]:.6g}]"
        )
    return float(np.interp(u, xs, grid.values[j])) / r


# --------------------------------------------------------------------------
# characteristic functions of tomogram rows
# --------------------------------------------------------------------------

_displacement_cache: dict = {}
_DISPLACEMENT_CACHE_MAX = 4


def _displacement_factors(nmax, r):
    """M[j, m, n] = <m| exp(i r_j X(0)) |n> for the unrotated quadrature.

    These are displacement-operator matrix elements with alpha = i r/sqrt(2);
    the matrix is symmetric in (m, n).  Recent (nmax, r-grid) results are
    cached since phase sweeps reuse the same radial nodes.
    """
    r = np.asarray(r, dtype=float)
    key = (int(nmax), r.tobytes())
    hit = _displacement_cache.get(key)
    if hit is not None:
        return hit
    a2 = 0.5 * r * r
    env = np.exp(-0.5 * a2)
    out = np.empty((r.size, nmax + 1, nmax + 1), dtype=complex)
    alpha = 1j * r / math.sqrt(2.0)
    for m in range(nmax + 1):
        for n in range(m, nmax + 1):
            k = n - m
            scale = math.exp(0.5 * (gammaln(m + 1) - gammaln(n + 1)))
            val = scale * alpha ** k * env * eval_genlaguerre(m, k, a2)
            out[:, m, n] = val
            out[:, n, m] = val
    while len(_displacement_cache) >= _DISPLACEMENT_CACHE_MAX:
        _displacement_cache.pop(next(iter(_displacement_cache)))
    _displacement_cache[key] = out
    return out


def _char_from_state(state, theta, r):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if isinstance(state, GaussianState):
        m = analytic_moments(state, theta)
        return np.exp(1j * r * m.mean - 0.5 * r * r * m.variance)
    if isinstance(state, FockSuperposition):
        c = state.coeff_array()
        nonzero = np.nonzero(np.abs(c) > 0.0)[0]
        if nonzero.size == 1:
            n = int(nonzero[0])
            a2 = 0.5 * r * r
            return np.exp(-0.5 * a2) * eval_genlaguerre(n, 0, a2) + 0j
        d = c * np.exp(-1j * np.arange(c.size) * theta)
        mats = _displacement_factors(state.cutoff, r)
        return np.einsum("m,jmn,n->j", np.conj(d), mats, d)
    if isinstance(state, MixedState):
        total = np.zeros(r.shape, dtype=complex)
        for w, comp in state.components:
            total += w * _char_from_state(comp, theta, r)
        return total
    raise InputError(f"expected a state, got {type(state).__name__}")


def tomogram_characteristic(source, phase: float, r):
    """phi(r, theta) = integral w(U, theta) exp(i r U) dU for r >= 0.

    ``source`` is a state spec (closed form; also used when a grid carries
    one) or a bare TomogramGrid (trapezoid sum over the stored row, guarded
    against X-grid aliasing).
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if not np.all(np.isfinite(r_arr)):
        raise InputError("r must be finite")
    if np.any(r_arr < 0.0):
        raise InputError("r must be >= 0")

    if isinstance(source, TomogramGrid):
        if source.source is not None:
            out = _char_from_state_wrapped(source.source, phase, r_arr)
        else:
            out = _char_from_grid(source, phase, r_arr)
    elif isinstance(source, (GaussianState, FockSuperposition, MixedState)):
        out = _char_from_state_wrapped(source, phase, r_arr)
    else:
        raise InputError(
            f"expected a TomogramGrid or state, got {type(source).__name__}"
        )
    if np.ndim(r) == 0:
        return complex(out[0])
    return out


def _char_from_state_wrapped(state, phase, r_arr):
    reduced, mirrored = wrap_phase(phase)
    out = _char_from_state(state, reduced, r_arr)
    return np.conj(out) if mirrored else out


def _char_from_grid(grid, phase, r_arr):
    row, mirrored = grid.row_at(phase)
    r_top = float(r_arr.max()) if r_arr.size else 0.0
    if r_top * grid.dx > math.pi / 2.0:
        raise ResolutionError(
            f"x grid spacing {grid.dx:.4g} is too coarse for r = {r_top:.4g} "
            f"(need r*dx <= pi/2)"
        )
    wts = np.full(grid.n_x, grid.dx)
    wts[0] *= 0.5
    wts[-1] *= 0.5
    out = kernels.amplitude_rows(row * wts, grid.xs, -1.0, r_arr)
    return np.conj(out) if mirrored else out


# --------------------------------------------------------------------------
# CSV persistence
# --------------------------------------------------------------------------

def save_tomogram_csv(grid: TomogramGrid, path):
    """Write "theta,x,w" rows, row-major by phase, full float precision."""
    with open(path, "w") as fh:
        fh.write("theta,x,w\n")
        for i, theta in enumerate(grid.phases):
            for j, x in enumerate(grid.xs):
                fh.write(f"{theta:.17g},{x:.17g},{grid.values[i, j]:.17g}\n")


def load_tomogram_csv(path) -> TomogramGrid:
    """Read a tomogram CSV; validates layout and row normalization."""
    try:
        with open(path) as fh:
            header = fh.readline().strip()
            if header != "theta,x,w":
                raise InputError(
                    f"{path}: expected header 'theta,x,w', got {header!r}"
                )
            try:
                data = np.loadtxt(fh, delimiter=",", ndmin=2)
            except ValueError as exc:
                raise InputError(f"{path}: malformed CSV: {exc}") from exc
    except OSError as exc:
        raise InputError(f"cannot read tomogram file {path}: {exc}") from exc
    if data.size == 0 or data.shape[1] != 3:
        raise InputError(f"{path}: expected three columns theta,x,w")
    thetas = data[:, 0]
    change = np.nonzero(np.diff(thetas) != 0.0)[0]
    n_x = int(change[0] + 1) if change.size else thetas.size
    if thetas.size % n_x != 0:
        raise InputError(f"{path}: ragged phase blocks")
    n_phases = thetas.size // n_x
    theta_blocks = thetas.reshape(n_phases, n_x)
    if not np.all(theta_blocks == theta_blocks[:, :1]):
        raise InputError(f"{path}: phase column is not constant within blocks")
    x_blocks = data[:, 1].reshape(n_phases, n_x)
    if not np.all(x_blocks == x_blocks[0]):
        raise InputError(f"{path}: x grid differs between phase blocks")
    values = data[:, 2].reshape(n_phases, n_x)
    return TomogramGrid(theta_blocks[:, 0], x_blocks[0], values)
