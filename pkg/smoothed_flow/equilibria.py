"""
Relative equilibria and collision fixed points of the reduced flow, with their
linear stability on the energy surface.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import brentq

from .dynamics import reduced_field, surface_residual
from .errors import RootBracketFailure
from .models import (
    CollisionSet,
    EnergyLevel,
    Equilibrium,
    EquilibriumSource,
    Flavor,
    PotentialSpec,
    ReducedState,
    StabilityKind,
)
from .potential import check_softening, energy_profile, energy_profile_slope, max_radius

logger = logging.getLogger(__name__)

CENTRE_REAL_TOL = 1e-8
INVARIANT_TOL = 1e-10


def reduced_jacobian(state: ReducedState, spec: PotentialSpec) -> np.ndarray:
    """Analytic Jacobian of the reduced field with respect to (r, v, u)."""
    a, eps = spec.alpha, spec.epsilon
    r, v, u = state.r, state.v, state.u
    k = 0.5 * (a - 2)
    s = r * r + eps * eps

    if not spec.is_amended:
        if eps == 0:
            pull_slope = 0.0
        else:
            pull_slope = a * (a + 2) * eps * eps * r ** (a + 1) * s ** (-a / 2 - 2)
        return np.array([
            [v, r, 0.0],
            [-pull_slope, a * v, 2 * u],
            [0.0, k * u, k * v],
        ])

    # amended: r' = v A(r), v' = P(r) W, u' = k P(r) u v
    radial = r ** ((a + 2) / 2) * s ** (-a / 4)
    radial_slope = 0.5 * (a + 2) * r ** (a / 2) * s ** (-a / 4) - 0.5 * a * r ** ((a + 4) / 2) * s ** (-a / 4 - 1)
    prefactor = r ** ((a + 4) / 2) * s ** (-(a + 4) / 4)
    prefactor_slope = 0.5 * (a + 4) * eps * eps * r ** ((a + 2) / 2) * s ** (-(a + 8) / 4)
    bracket = u * u + 0.5 * a * v * v - a
    return np.array([
        [v * radial_slope, radial, 0.0],
        [prefactor_slope * bracket, prefactor * a * v, prefactor * 2 * u],
        [k * prefactor_slope * u * v, k * prefactor * u, k * prefactor * v],
    ])


def surface_normal(state: ReducedState, spec: PotentialSpec, h: EnergyLevel) -> np.ndarray:
    """Gradient of u^2 + v^2 - f(r); the radial slope is dropped on the collision set."""
    slope = 0.0 if state.r == 0 else energy_profile_slope(state.r, spec, h)
    return np.array([-slope, 2 * state.v, 2 * state.u])


def surface_eigenvalues(state: ReducedState, spec: PotentialSpec, h: EnergyLevel) -> Optional[np.ndarray]:
    """
    Eigenvalues of the Jacobian restricted to the tangent plane of the energy surface.
    None where the surface is singular (zero normal).
    """
    normal = surface_normal(state, spec, h)
    if np.linalg.norm(normal) == 0:
        return None
    basis = null_space(normal[np.newaxis, :])
    restricted = basis.T @ reduced_jacobian(state, spec) @ basis
    return np.linalg.eigvals(restricted)


def stability_kind(eigenvalues: Optional[Sequence[complex]]) -> StabilityKind:
    """Centre for a pure-imaginary pair, Saddle for real eigenvalues of opposite sign."""
    if eigenvalues is None or len(eigenvalues) != 2:
        return StabilityKind.UNRESOLVED
    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    if np.all(np.abs(eigenvalues.real) < CENTRE_REAL_TOL) and np.all(eigenvalues.imag != 0):
        return StabilityKind.CENTRE
    if np.all(np.abs(eigenvalues.imag) < CENTRE_REAL_TOL):
        real = np.sort(eigenvalues.real)
        if real[0] < 0 < real[1]:
            return StabilityKind.SADDLE
    return StabilityKind.UNRESOLVED


def _equilibrium_pair(r_e: float, u_e: float, spec: PotentialSpec, h: EnergyLevel, source: EquilibriumSource) -> List[Equilibrium]:
    pair = []
    for sign in (1.0, -1.0):
        state = ReducedState(r=r_e, v=0.0, u=sign * u_e)
        field = np.max(np.abs(reduced_field(state, spec)))
        residual = abs(surface_residual(state, spec, h))
        if field > INVARIANT_TOL or residual > INVARIANT_TOL:
            logger.warning("equilibrium at r=%.12g: |field| = %.3e, energy residual = %.3e", r_e, field, residual)
        eigenvalues = surface_eigenvalues(state, spec, h)
        pair.append(Equilibrium(
            r_e=r_e,
            u_e=sign * u_e,
            kind=stability_kind(eigenvalues),
            source=source,
            eigenvalues=[(float(z.real), float(z.imag)) for z in eigenvalues] if eigenvalues is not None else [],
        ))
    return pair


def equilibrium_condition(r, spec: PotentialSpec, h: EnergyLevel):
    """q(r) = (2 - alpha) r^2 + 2 eps^2 - 2|h| (r^2 + eps^2)^(alpha/2 + 1); zero at plain-smoothed equilibria."""
    a, eps = spec.alpha, spec.epsilon
    s = r * r + eps * eps
    return (2 - a) * r * r + 2 * eps * eps - 2 * h.magnitude * s ** (a / 2 + 1)


def relative_equilibria(spec: PotentialSpec, h: EnergyLevel) -> List[Equilibrium]:
    """
    Circular orbits (r_e, 0, +-u_e), positive u_e first.

    Non-smoothed: closed form for alpha < 2, none otherwise.
    Plain-smoothed: the unique root of q(r) on (0, 2 R_max].
    Amended: closed form in r^2 + eps^2 for alpha < 2 when it exceeds eps^2.
    """
    check_softening(spec, h)
    a, hm = spec.alpha, h.magnitude

    if spec.flavor == Flavor.NON_SMOOTHED:
        if a >= 2:
            return []
        r_e = ((2 - a) / (2 * hm)) ** (1 / a)
        return _equilibrium_pair(r_e, math.sqrt(a), spec, h, EquilibriumSource.CLOSED_FORM)

    if spec.flavor == Flavor.AMENDED_SMOOTHED:
        if a >= 2:
            return []
        s_e = ((2 - a) / (2 * hm)) ** (2 / a)
        if s_e <= spec.epsilon ** 2:
            return []
        return _equilibrium_pair(math.sqrt(s_e - spec.epsilon ** 2), math.sqrt(a), spec, h, EquilibriumSource.CLOSED_FORM)

    upper = 2 * max_radius(spec, h)
    q_low, q_high = equilibrium_condition(0.0, spec, h), equilibrium_condition(upper, spec, h)
    if not q_low > 0 > q_high:
        raise RootBracketFailure(f"q(0) = {q_low:.3e}, q(2 R_max) = {q_high:.3e}: no sign change")
    r_e = brentq(lambda r: equilibrium_condition(r, spec, h), 0.0, upper, xtol=1e-300)
    logger.debug("plain equilibrium root r=%.15g (alpha=%g, epsilon=%g)", r_e, a, spec.epsilon)
    u_e = math.sqrt(max(energy_profile(r_e, spec, h), 0.0))
    return _equilibrium_pair(r_e, u_e, spec, h, EquilibriumSource.ROOT_FIND)


def collision_fixed_points(spec: PotentialSpec, h: Optional[EnergyLevel] = None) -> CollisionSet:
    """
    C+- = (0, +-sqrt(2), 0) without softening, the origin O for plain smoothing.
    The amended collision set is a circle of fixed points; its radius is reported when h is given.
    """
    if spec.flavor == Flavor.NON_SMOOTHED:
        root2 = math.sqrt(2)
        return CollisionSet(points=[ReducedState(r=0.0, v=root2, u=0.0), ReducedState(r=0.0, v=-root2, u=0.0)])
    if spec.flavor == Flavor.PLAIN_SMOOTHED:
        return CollisionSet(points=[ReducedState(r=0.0, v=0.0, u=0.0)])
    radius = None
    if h is not None:
        check_softening(spec, h)
        radius = math.sqrt(energy_profile(0.0, spec, h))
    return CollisionSet(points=[], manifold_radius=radius)
