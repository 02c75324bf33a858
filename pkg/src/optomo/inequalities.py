"""Uncertainty-relation checks on tomogram variances.

Two checks share the bound 1/4 (hbar = 1): the single-state product
Var(theta=0) * Var(theta=pi/2), and the two-state symmetric cross product

    1/2 Var_1(theta) Var_2(theta + pi/2) + 1/2 Var_2(theta) Var_1(theta + pi/2),

which reduces to the former for identical states.  The checker accepts any
normalized non-negative rows, quantum-realizable or not, so violation
detection (e.g. on sub-quantum classical rows) is a supported use case.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .moments import tomographic_variance
from .states import State, analytic_moments
from .tomography import TomogramGrid

__all__ = [
    "BOUND",
    "InequalityReport",
    "heisenberg_lhs",
    "trifonov_lhs",
    "trifonov_sweep",
    "operator_trifonov_lhs",
]

BOUND = 0.25
DEFAULT_TOLERANCE = 1e-9
_KINDS = ("heisenberg", "trifonov", "trifonov_sweep")


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of one bound check; ``margin = lhs - bound`` and the check is
    satisfied when margin >= -tolerance (3*stderr for empirical checks)."""

    kind: str
    phase: float
    lhs: float
    bound: float
    margin: float
    satisfied: bool
    stderr: float | None = None
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InputError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.bound != BOUND:
            raise InputError(f"bound is fixed at {BOUND}, got {self.bound}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "phase": self.phase,
            "lhs": self.lhs,
            "bound": self.bound,
            "margin": self.margin,
            "satisfied": self.satisfied,
            "stderr": self.stderr,
            "tolerance": self.tolerance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "InequalityReport":
        try:
            return cls(
                kind=d["kind"],
                phase=float(d["phase"]),
                lhs=float(d["lhs"]),
                bound=float(d["bound"]),
                margin=float(d["margin"]),
                satisfied=bool(d["satisfied"]),
                stderr=None if d.get("stderr") is None else float(d["stderr"]),
                tolerance=float(d.get("tolerance", DEFAULT_TOLERANCE)),
            )
        except KeyError as exc:
            raise InputError(f"report is missing field {exc}") from exc


def _report(kind, phase, lhs, tolerance, stderr=None):
    margin = lhs - BOUND
    return InequalityReport(
        kind=kind,
        phase=float(phase),
        lhs=float(lhs),
        bound=BOUND,
        margin=float(margin),
        satisfied=bool(margin >= -tolerance),
        stderr=stderr,
        tolerance=float(tolerance),
    )


def heisenberg_lhs(grid: TomogramGrid, *, tolerance: float = DEFAULT_TOLERANCE) -> InequalityReport:
    """Var at phase 0 times Var at phase pi/2, against the bound 1/4."""
    v_q = tomographic_variance(grid, 0.0)
    v_p = tomographic_variance(grid, math.pi / 2.0)
    return _report("heisenberg", 0.0, v_q * v_p, tolerance)


def trifonov_lhs(
    w1: TomogramGrid,
    w2: TomogramGrid,
    phase: float,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
) -> InequalityReport:
    """Symmetric two-state dispersion cross product at one phase."""
    phase = float(phase)
    other = phase + math.pi / 2.0
    v1 = tomographic_variance(w1, phase)
    v1_rot = tomographic_variance(w1, other)
    v2 = tomographic_variance(w2, phase)
    v2_rot = tomographic_variance(w2, other)
    lhs = 0.5 * (v1 * v2_rot) + 0.5 * (v2 * v1_rot)
    return _report("trifonov", phase, lhs, tolerance)


def trifonov_sweep(
    w1: TomogramGrid,
    w2: TomogramGrid,
    phases=None,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
) -> InequalityReport:
    """Minimum of the two-state check over a list of phases (argmin reported;
    ties resolved toward the smallest phase)."""
    if phases is None:
        phases = w1.phases
    phase_arr = np.asarray(phases, dtype=float)
    if phase_arr.ndim != 1 or phase_arr.size == 0:
        raise InputError("phase list must be non-empty")
    best_lhs = math.inf
    best_phase = math.inf
    for theta in phase_arr:
        rep = trifonov_lhs(w1, w2, float(theta), tolerance=tolerance)
        if rep.lhs < best_lhs or (rep.lhs == best_lhs and rep.phase < best_phase):
            best_lhs = rep.lhs
            best_phase = rep.phase
    return _report("trifonov_sweep", best_phase, best_lhs, tolerance)


def operator_trifonov_lhs(s1: State, s2: State, phase: float = 0.0) -> float:
    """The same two-state quantity from closed-form moments (no tomograms);
    serves as the anti-drift oracle for the tomographic route."""
    other = float(phase) + math.pi / 2.0
    v1 = analytic_moments(s1, phase).variance
    v1_rot = analytic_moments(s1, other).variance
    v2 = analytic_moments(s2, phase).variance
    v2_rot = analytic_moments(s2, other).variance
    return 0.5 * (v1 * v2_rot) + 0.5 * (v2 * v1_rot)
