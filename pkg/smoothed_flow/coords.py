"""
Coordinate transforms: Cartesian <-> polar <-> McGehee, and the time rescale.
"""

import logging
import math
from typing import Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad

from .config import QUADRATURE_TOL
from .errors import DomainError, QuadratureError
from .models import CartesianState, McGeheeState, PolarState, PotentialSpec, Trajectory

logger = logging.getLogger(__name__)

_QUADRATURE_ABS_TOL = 1e-13


def cartesian_to_polar(state: CartesianState) -> PolarState:
    """pr = (x px + y py) / r, ptheta = x py - y px."""
    r = math.hypot(state.x, state.y)
    if r == 0:
        raise DomainError("polar coordinates are undefined at the origin")
    return PolarState(
        r=r,
        theta=math.atan2(state.y, state.x),
        pr=(state.x * state.px + state.y * state.py) / r,
        ptheta=state.x * state.py - state.y * state.px,
    )


def polar_to_cartesian(state: PolarState) -> CartesianState:
    cos_t, sin_t = math.cos(state.theta), math.sin(state.theta)
    tangential = state.ptheta / state.r
    return CartesianState(
        x=state.r * cos_t,
        y=state.r * sin_t,
        px=state.pr * cos_t - tangential * sin_t,
        py=state.pr * sin_t + tangential * cos_t,
    )


def _momentum_scales(r: float, spec: PotentialSpec) -> Tuple[float, float]:
    """Factors (for v, for u) with v = pr * a, u = ptheta * b."""
    a = spec.alpha
    if spec.is_amended:
        s = r * r + spec.epsilon ** 2
        return s ** (a / 4), s ** ((a - 2) / 4)
    return r ** (a / 2), r ** ((a - 2) / 2)


def polar_to_mcgehee(state: PolarState, spec: PotentialSpec) -> McGeheeState:
    """v = pr r^(alpha/2), u = ptheta r^((alpha-2)/2); r^2 + eps^2 replaces r^2 for the amended flavor."""
    scale_v, scale_u = _momentum_scales(state.r, spec)
    return McGeheeState(r=state.r, v=state.pr * scale_v, theta=state.theta, u=state.ptheta * scale_u)


def mcgehee_to_polar(state: McGeheeState, spec: PotentialSpec) -> PolarState:
    """Inverse of polar_to_mcgehee; points on the collision set r = 0 have no preimage."""
    if state.r <= 0:
        raise DomainError("collision-set points (r = 0) have no physical preimage")
    scale_v, scale_u = _momentum_scales(state.r, spec)
    return PolarState(r=state.r, theta=state.theta, pr=state.v / scale_v, ptheta=state.u / scale_u)


def cartesian_to_mcgehee(state: CartesianState, spec: PotentialSpec) -> McGeheeState:
    return polar_to_mcgehee(cartesian_to_polar(state), spec)


def mcgehee_to_cartesian(state: McGeheeState, spec: PotentialSpec) -> CartesianState:
    return polar_to_cartesian(mcgehee_to_polar(state, spec))


def time_rescale_rate(r, spec: PotentialSpec):
    """dt/dtau = r^((alpha+2)/2) for every flavor."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("r must be non-negative")
    value = r ** ((spec.alpha + 2) / 2)
    return float(value) if np.ndim(value) == 0 else value


def _step_duration(rate, a: float, b: float) -> float:
    """Physical time spent between tau = a and tau = b, whatever their order."""
    value, abserr, _, *message = quad(rate, a, b, epsabs=_QUADRATURE_ABS_TOL, epsrel=QUADRATURE_TOL, full_output=1)
    if message:
        raise QuadratureError(f"quadrature did not converge on [{a:.6g}, {b:.6g}] (error {abserr:.2e}): {message[0]}")
    return abs(value)


def physical_time(traj: Trajectory, spec: PotentialSpec) -> np.ndarray:
    """
    Physical time t at each sample of a tau-parametrized trajectory, with t = 0 at the
    first sample. t counts elapsed time along the sampling order, so it also increases
    for backward (direction = -1) trajectories. Uses the dense interpolant when present,
    else trapezoids on the samples.
    """
    tau = traj.tau
    if len(tau) == 1:
        return np.zeros(1)

    if traj.dense is None:
        logger.debug("no dense output; trapezoidal quadrature on %d samples", len(tau))
        rate = time_rescale_rate(np.clip(traj.r, 0.0, None), spec)
        return cumulative_trapezoid(rate, traj.direction * tau, initial=0.0)

    def rate(point: float) -> float:
        return time_rescale_rate(max(float(traj.dense(point)[0]), 0.0), spec)

    increments = [_step_duration(rate, float(a), float(b)) for a, b in zip(tau[:-1], tau[1:])]
    return np.concatenate(([0.0], np.cumsum(increments)))
