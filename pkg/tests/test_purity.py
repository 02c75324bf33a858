import math

import numpy as np
import pytest

from optomo import (
    FockSuperposition,
    GaussianState,
    InputError,
    MixedState,
    ResolutionError,
    TomogramGrid,
    fock,
    gaussian_row,
    purity_classify,
    purity_overlap,
    thermal_state,
    tomogram_grid,
    uniform_phases,
    vacuum,
)
from oracles import random_state


def test_every_pure_family_has_unit_self_overlap():
    for state in (
        vacuum(),
        fock(1),
        fock(3),
        GaussianState(0.0, 0.0, 2.0),
        GaussianState(1.3, -0.8, 2.5),
        FockSuperposition((0.5, 0.5j, -0.3, 0.2 + 0.1j)),
    ):
        assert purity_overlap(state, state) == pytest.approx(1.0, abs=1e-3)


def test_orthogonal_states_have_zero_overlap():
    assert purity_overlap(vacuum(), fock(1)) == pytest.approx(0.0, abs=1e-3)


def test_thermal_self_overlap():
    state = thermal_state(1.0)
    assert purity_overlap(state, state) == pytest.approx(1.0 / 3.0, abs=1e-3)


def test_equal_mixture_self_overlap():
    mix = MixedState(((0.5, fock(0)), (0.5, fock(1))))
    assert purity_overlap(mix, mix) == pytest.approx(0.5, abs=1e-3)


@pytest.mark.parametrize("lam", [0.0, 0.25, 0.5, 1.0])
def test_two_component_mixture_follows_weight_squares(lam):
    if lam in (0.0, 1.0):
        # degenerate mixtures are just the surviving pure component
        state = fock(1) if lam == 0.0 else fock(0)
        expected = 1.0
    else:
        state = MixedState(((lam, fock(0)), (1.0 - lam, fock(1))))
        expected = lam ** 2 + (1.0 - lam) ** 2
    assert purity_overlap(state, state) == pytest.approx(expected, abs=1e-3)


def test_displaced_vacuum_cross_overlap():
    # overlap with the vacuum is exp(-(mq^2 + mp^2)/2)
    state = GaussianState(1.0, 0.5, 1.0)
    expected = math.exp(-(1.0 ** 2 + 0.5 ** 2) / 2.0)
    assert purity_overlap(vacuum(), state) == pytest.approx(expected, abs=1e-6)


def test_overlap_is_symmetric():
    a = GaussianState(0.4, -0.2, 1.8)
    b = FockSuperposition((0.6, 0.8))
    assert abs(purity_overlap(a, b) - purity_overlap(b, a)) < 1e-10


@pytest.mark.parametrize("seed", range(8))
def test_self_overlap_stays_in_the_unit_interval(seed):
    state = random_state(np.random.default_rng(300 + seed))
    value = purity_overlap(state, state)
    assert -1e-6 <= value <= 1.0 + 1e-6


def test_grid_route_agrees_with_state_route():
    state = FockSuperposition((0.8, 0.0, 0.6))
    grid = tomogram_grid(state, phases=64)
    bare = TomogramGrid(grid.phases, grid.xs, grid.values)
    assert purity_overlap(bare, bare) == pytest.approx(
        purity_overlap(state, state), abs=1e-4
    )


def test_classify_labels_and_report_fields():
    rep = purity_classify(vacuum())
    assert rep.classification == "pure"
    assert rep.overlap == pytest.approx(1.0, abs=1e-3)
    assert rep.to_dict() == {
        "overlap": rep.overlap,
        "classification": "pure",
        "tolerance": 1e-3,
    }
    rep = purity_classify(thermal_state(1.0))
    assert rep.classification == "mixed"
    assert rep.overlap == pytest.approx(1.0 / 3.0, abs=1e-3)


def test_classify_rejects_nonpositive_tolerance():
    with pytest.raises(InputError):
        purity_classify(vacuum(), tol=0.0)


def test_coarse_grid_rows_are_rejected():
    xs = np.linspace(-6.0, 6.0, 16)
    row = gaussian_row(xs, 0.0, 0.5)
    row = row / np.trapezoid(row, xs)
    grid = TomogramGrid(uniform_phases(4), xs, np.tile(row, (4, 1)))
    with pytest.raises(ResolutionError):
        purity_overlap(grid, grid)


def test_mismatched_grid_phases_rejected():
    state = vacuum()
    g1 = tomogram_grid(state, phases=8)
    g2 = tomogram_grid(state, phases=16)
    b1 = TomogramGrid(g1.phases, g1.xs, g1.values)
    b2 = TomogramGrid(g2.phases, g2.xs, g2.values)
    with pytest.raises(InputError, match="share"):
        purity_overlap(b1, b2)
