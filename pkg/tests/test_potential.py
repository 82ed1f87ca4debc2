import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from smoothed_flow.errors import DomainError, FlavorError, InvalidSoftening, SingularityError
from smoothed_flow.models import AngularMomentum, CartesianState, EnergyLevel, Flavor, PolarState, PotentialSpec
from smoothed_flow.potential import (
    admissible_c_bound,
    amended_potential,
    energy_profile,
    hamiltonian,
    max_radius,
    momentum_curve,
    polar_hamiltonian,
)

NONE = Flavor.NON_SMOOTHED
PLAIN = Flavor.PLAIN_SMOOTHED
AMENDED = Flavor.AMENDED_SMOOTHED


@st.composite
def softened_levels(draw, flavor=PLAIN, min_alpha=0.2, max_alpha=4.0):
    """(spec, h) pairs with |h| eps^alpha safely below 1."""
    alpha = draw(st.floats(min_alpha, max_alpha))
    h = draw(st.floats(-2.0, -0.1))
    product = draw(st.floats(1e-4, 0.9))
    epsilon = (product / abs(h)) ** (1 / alpha)
    return PotentialSpec(alpha=alpha, epsilon=epsilon, flavor=flavor), EnergyLevel(h=h)


def test_energy_profile_examples():
    """Energy curve values at the collision set and at R_max."""
    h1 = EnergyLevel(h=-1)
    assert energy_profile(0.0, PotentialSpec(alpha=1.7), h1) == 2.0
    assert energy_profile(0.0, PotentialSpec(alpha=2.3, epsilon=0.1, flavor=PLAIN), EnergyLevel(h=-0.4)) == 0.0
    assert energy_profile(1.0, PotentialSpec(alpha=2), h1) == pytest.approx(0.0, abs=1e-15)
    assert energy_profile(0.0, PotentialSpec(alpha=2, epsilon=0.1, flavor=AMENDED), h1) == pytest.approx(1.98)


def test_energy_profile_accepts_arrays():
    """Array input gives array output of the same shape."""
    r = np.linspace(0.0, 1.0, 7)
    values = energy_profile(r, PotentialSpec(alpha=2), EnergyLevel(h=-1))
    assert values.shape == r.shape
    np.testing.assert_allclose(values, 2 - 2 * r ** 2)


def test_energy_profile_rejects_negative_radius():
    with pytest.raises(DomainError):
        energy_profile(-0.1, PotentialSpec(alpha=1), EnergyLevel(h=-1))


def test_momentum_curve_examples():
    """u_c values for alpha = 2, alpha = 1, c = 0 and the amended flavor at r = 0."""
    for r in (0.0, 0.3, 5.0):
        assert momentum_curve(r, PotentialSpec(alpha=2), AngularMomentum(c=1.3)) == pytest.approx(1.3)
    assert momentum_curve(4.0, PotentialSpec(alpha=1), AngularMomentum(c=2)) == pytest.approx(1.0)
    assert momentum_curve(0.7, PotentialSpec(alpha=3), AngularMomentum(c=0)) == 0.0
    amended = PotentialSpec(alpha=2, epsilon=0.5, flavor=AMENDED)
    assert momentum_curve(0.0, amended, AngularMomentum(c=7)) == pytest.approx(7.0)


def test_momentum_curve_diverges_at_origin_below_two():
    with pytest.raises(DomainError):
        momentum_curve(0.0, PotentialSpec(alpha=1), AngularMomentum(c=0.5))


@pytest.mark.parametrize("alpha,epsilon,h,expected", [
    (2, 0.0, -1, 1.0),
    (2, 0.6, -1, 0.8),
    (1, 0.0, -0.5, 2.0),
])
def test_max_radius_examples(alpha, epsilon, h, expected):
    flavor = NONE if epsilon == 0 else PLAIN
    spec = PotentialSpec(alpha=alpha, epsilon=epsilon, flavor=flavor)
    assert max_radius(spec, EnergyLevel(h=h)) == pytest.approx(expected)


def test_max_radius_rejects_large_softening():
    """|h| eps^alpha >= 1 leaves no bounded region."""
    with pytest.raises(InvalidSoftening):
        max_radius(PotentialSpec(alpha=1, epsilon=2, flavor=PLAIN), EnergyLevel(h=-1))


def test_amended_potential_examples():
    assert amended_potential(0.0, PotentialSpec(alpha=2, epsilon=1, flavor=AMENDED), AngularMomentum(c=2)) == pytest.approx(1.0)
    assert amended_potential(1.0, PotentialSpec(alpha=2), AngularMomentum(c=0)) == pytest.approx(-1.0)
    far = amended_potential(1e6, PotentialSpec(alpha=1.5, epsilon=0.2, flavor=AMENDED), AngularMomentum(c=3))
    assert -1e-6 < far < 1e-6


def test_admissible_c_bound_examples():
    """Bound at alpha = 2 and 3, and the degenerate |h| eps^alpha = 1 limit."""
    h = EnergyLevel(h=-1)
    assert admissible_c_bound(PotentialSpec(alpha=2, epsilon=0.1, flavor=AMENDED), h) == pytest.approx(math.sqrt(1.98))
    assert admissible_c_bound(PotentialSpec(alpha=2, epsilon=1, flavor=AMENDED), h) == pytest.approx(0.0, abs=1e-15)
    assert admissible_c_bound(PotentialSpec(alpha=3, epsilon=0.1, flavor=AMENDED), h) == pytest.approx(
        math.sqrt(2 * (1 - 0.001) / 0.1)
    )


def test_admissible_c_bound_equals_momentum_curve_at_origin():
    """At the bound, u_c(0) = sqrt(f(0))."""
    spec, h = PotentialSpec(alpha=3, epsilon=0.1, flavor=AMENDED), EnergyLevel(h=-1)
    bound = AngularMomentum(c=admissible_c_bound(spec, h))
    assert momentum_curve(0.0, spec, bound) == pytest.approx(math.sqrt(energy_profile(0.0, spec, h)))


def test_admissible_c_bound_requires_amended_flavor():
    with pytest.raises(FlavorError):
        admissible_c_bound(PotentialSpec(alpha=2, epsilon=0.1, flavor=PLAIN), EnergyLevel(h=-1))


@given(softened_levels(flavor=PLAIN))
def test_energy_profile_vanishes_at_max_radius_plain(case):
    spec, h = case
    assert energy_profile(max_radius(spec, h), spec, h) == pytest.approx(0.0, abs=1e-12)


@given(softened_levels(flavor=AMENDED))
def test_energy_profile_vanishes_at_max_radius_amended(case):
    spec, h = case
    assert energy_profile(max_radius(spec, h), spec, h) == pytest.approx(0.0, abs=1e-12)


@given(st.floats(0.2, 4.0), st.floats(-2.0, -0.1), st.floats(1e-3, 10.0))
def test_non_smoothed_energy_profile_closed_form(alpha, h, r):
    value = energy_profile(r, PotentialSpec(alpha=alpha), EnergyLevel(h=h))
    assert value == pytest.approx(2 - 2 * abs(h) * r ** alpha, rel=1e-12, abs=1e-12)


@given(softened_levels(flavor=PLAIN, min_alpha=1.0))
def test_plain_energy_profile_has_single_interior_maximum(case):
    """Sampled f rises then falls on (0, R_max) for alpha >= 1."""
    spec, h = case
    r = np.linspace(0.0, max_radius(spec, h), 2001)
    steps = np.sign(np.diff(energy_profile(r, spec, h)))
    steps = steps[steps != 0]
    assert energy_profile(0.0, spec, h) == 0.0
    assert steps[0] > 0 and steps[-1] < 0
    assert np.count_nonzero(steps[1:] != steps[:-1]) == 1


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 2.5, 3.0])
def test_momentum_curve_constant_only_at_alpha_two(alpha):
    r = np.linspace(0.1, 3.0, 50)
    values = momentum_curve(r, PotentialSpec(alpha=alpha), AngularMomentum(c=0.8))
    assert np.allclose(values, values[0]) == (alpha == 2.0)


@pytest.mark.parametrize("alpha", [2.0, 2.5, 3.0])
def test_admissible_c_bound_decreases_with_epsilon(alpha):
    h = EnergyLevel(h=-1.3)
    top = (1 / abs(h.h)) ** (1 / alpha)
    bounds = [
        admissible_c_bound(PotentialSpec(alpha=alpha, epsilon=eps, flavor=AMENDED), h)
        for eps in np.linspace(0.01, 0.99 * top, 40)
    ]
    assert np.all(np.diff(bounds) < 0)


def test_hamiltonian_matches_polar_form():
    """Cartesian and polar Hamiltonians agree off the origin."""
    spec = PotentialSpec(alpha=1.5, epsilon=0.2, flavor=PLAIN)
    cartesian = CartesianState(x=0.6, y=0.8, px=-0.3, py=0.4)
    r = 1.0
    polar = PolarState(r=r, theta=math.atan2(0.8, 0.6), pr=0.6 * -0.3 + 0.8 * 0.4, ptheta=0.6 * 0.4 - 0.8 * -0.3)
    assert hamiltonian(cartesian, spec) == pytest.approx(polar_hamiltonian(polar, spec))


def test_hamiltonian_errors():
    with pytest.raises(SingularityError):
        hamiltonian(CartesianState(x=0, y=0, px=1, py=0), PotentialSpec(alpha=1))
    with pytest.raises(FlavorError):
        hamiltonian(CartesianState(x=1, y=0, px=0, py=0), PotentialSpec(alpha=2, epsilon=0.1, flavor=AMENDED))


def test_value_types_validate():
    """Positive h, mismatched flavor/epsilon and negative c are rejected."""
    with pytest.raises(ValidationError, match="h must be negative"):
        EnergyLevel(h=0.5)
    with pytest.raises(ValidationError):
        PotentialSpec(alpha=1, epsilon=0.1, flavor=NONE)
    with pytest.raises(ValidationError):
        PotentialSpec(alpha=1, flavor=PLAIN)
    with pytest.raises(ValidationError):
        AngularMomentum(c=-1)
    reflected = AngularMomentum.from_signed(-0.5)
    assert reflected.c == 0.5 and reflected.reflected


def test_amended_below_two_is_flagged():
    assert PotentialSpec(alpha=1.5, epsilon=0.1, flavor=AMENDED).outside_validated_scope
    assert not PotentialSpec(alpha=2.5, epsilon=0.1, flavor=AMENDED).outside_validated_scope
