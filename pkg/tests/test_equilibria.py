import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from smoothed_flow.dynamics import reduced_field, surface_residual
from smoothed_flow.equilibria import (
    collision_fixed_points,
    equilibrium_condition,
    relative_equilibria,
    stability_kind,
    surface_eigenvalues,
)
from smoothed_flow.models import (
    EnergyLevel,
    EquilibriumSource,
    Flavor,
    PotentialSpec,
    ReducedState,
    StabilityKind,
)


def test_kepler_equilibria():
    """alpha = 1, h = -1/2: circular orbits at r = 1 with u = +-1, both centres."""
    equilibria = relative_equilibria(PotentialSpec(alpha=1), EnergyLevel(h=-0.5))
    assert [eq.u_e for eq in equilibria] == pytest.approx([1.0, -1.0])
    for eq in equilibria:
        assert eq.r_e == pytest.approx(1.0)
        assert eq.kind == StabilityKind.CENTRE
        assert eq.source == EquilibriumSource.CLOSED_FORM


@pytest.mark.parametrize("alpha", [2.0, 2.5, 3.0])
def test_no_unsmoothed_equilibria_from_alpha_two(alpha):
    assert relative_equilibria(PotentialSpec(alpha=alpha), EnergyLevel(h=-1)) == []


def test_plain_equilibrium_above_two():
    """alpha = 3, eps = 0.1: one root of q, satisfying the field and energy relations."""
    spec, h = PotentialSpec(alpha=3, epsilon=0.1, flavor=Flavor.PLAIN_SMOOTHED), EnergyLevel(h=-1)
    equilibria = relative_equilibria(spec, h)
    assert len(equilibria) == 2
    assert equilibria[0].r_e == equilibria[1].r_e > 0
    assert equilibria[0].source == EquilibriumSource.ROOT_FIND
    assert equilibrium_condition(equilibria[0].r_e, spec, h) == pytest.approx(0.0, abs=1e-12)
    for eq in equilibria:
        assert np.max(np.abs(reduced_field(eq.state(), spec))) < 1e-10
        assert abs(surface_residual(eq.state(), spec, h)) < 1e-10


def test_amended_equilibria_below_two():
    spec, h = PotentialSpec(alpha=1, epsilon=0.2, flavor=Flavor.AMENDED_SMOOTHED), EnergyLevel(h=-0.5)
    equilibria = relative_equilibria(spec, h)
    assert equilibria[0].r_e == pytest.approx(math.sqrt(1 - 0.04))
    assert relative_equilibria(PotentialSpec(alpha=3, epsilon=0.1, flavor=Flavor.AMENDED_SMOOTHED), EnergyLevel(h=-1)) == []


def test_plain_root_approaches_closed_form():
    """At eps = 1e-8 the plain root matches the unsmoothed closed form."""
    rng = np.random.default_rng(7)
    for _ in range(100):
        alpha, h = rng.uniform(0.2, 1.9), EnergyLevel(h=rng.uniform(-2.0, -0.1))
        closed = relative_equilibria(PotentialSpec(alpha=alpha), h)[0].r_e
        smoothed = relative_equilibria(PotentialSpec(alpha=alpha, epsilon=1e-8, flavor=Flavor.PLAIN_SMOOTHED), h)[0].r_e
        assert smoothed == pytest.approx(closed, abs=1e-6)


@given(st.floats(0.2, 1.9), st.floats(-2.0, -0.1))
def test_unsmoothed_equilibria_are_centres(alpha, h):
    for eq in relative_equilibria(PotentialSpec(alpha=alpha), EnergyLevel(h=h)):
        assert eq.kind == StabilityKind.CENTRE
        assert len(eq.eigenvalues) == 2


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_collision_points_are_saddles(alpha):
    """Spectrum at C+ is {sqrt 2, (alpha - 2) sqrt 2 / 2}."""
    spec, h = PotentialSpec(alpha=alpha), EnergyLevel(h=-1)
    eigenvalues = surface_eigenvalues(ReducedState(r=0.0, v=math.sqrt(2), u=0.0), spec, h)
    assert sorted(eigenvalues.real) == pytest.approx(sorted([math.sqrt(2), (alpha - 2) * math.sqrt(2) / 2]))
    assert stability_kind(eigenvalues) == StabilityKind.SADDLE


def test_stability_kind_unresolved_without_surface():
    assert stability_kind(None) == StabilityKind.UNRESOLVED
    assert stability_kind([1.0, 2.0]) == StabilityKind.UNRESOLVED


def test_collision_fixed_points():
    unsmoothed = collision_fixed_points(PotentialSpec(alpha=1.3))
    assert np.array([p.as_array() for p in unsmoothed.points]) == pytest.approx(np.array([[0, math.sqrt(2), 0], [0, -math.sqrt(2), 0]]))

    plain = collision_fixed_points(PotentialSpec(alpha=3, epsilon=0.2, flavor=Flavor.PLAIN_SMOOTHED))
    assert [p.as_array().tolist() for p in plain.points] == [[0.0, 0.0, 0.0]]

    spec = PotentialSpec(alpha=3, epsilon=0.1, flavor=Flavor.AMENDED_SMOOTHED)
    amended = collision_fixed_points(spec, EnergyLevel(h=-1))
    assert amended.points == []
    assert amended.manifold_radius == pytest.approx(math.sqrt(2 * (1 - 0.001)))
    assert collision_fixed_points(spec).manifold_radius is None
