"""
Vector fields of the smoothed problem, an event-detecting integrator and drift monitors.

The regularized fields live in McGehee coordinates; states are handled as arrays in
the order (r, v, u[, theta]) so the reduced field is the first three components.
"""

import functools
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import DOP853, RK45, OdeSolution
from scipy.optimize import brentq

from .config import CLOSURE_DEPART_FACTOR, EVENT_ARM_FACTOR, SURFACE_TOL
from .errors import DomainError, EnergyViolation, FlavorError, SingularityError, StepFailure
from .models import (
    AmendedForm,
    CartesianState,
    DriftReport,
    EnergyLevel,
    Event,
    EventKind,
    IntegrationOptions,
    McGeheeState,
    PotentialSpec,
    ReducedState,
    Trajectory,
)
from .potential import check_softening, energy_profile, max_radius

logger = logging.getLogger(__name__)

State = Union[ReducedState, McGeheeState]

_SOLVERS = {"DOP853": DOP853, "RK45": RK45}
_ROOT_XTOL = 1e-15
_MAX_RADIUS_TOUCH_FACTOR = 1e-8
_MISMATCH_TOL = 1e-12


def cartesian_field(state: CartesianState, spec: PotentialSpec) -> CartesianState:
    """Hamilton's equations of H = |p|^2/2 - (|q|^2 + eps^2)^(-alpha/2)."""
    if spec.is_amended:
        raise FlavorError("the amended flavor has no Cartesian field")
    s = state.x ** 2 + state.y ** 2 + spec.epsilon ** 2
    if s == 0:
        raise SingularityError("force is singular at the origin without softening")
    pull = spec.alpha * s ** (-spec.alpha / 2 - 1)
    return CartesianState(x=state.px, y=state.py, px=-pull * state.x, py=-pull * state.y)


def _plain_rates(y, alpha: float, epsilon: float) -> Tuple[float, float, float, float]:
    """(r', v', u', theta') for the non-smoothed and plain-smoothed flavors."""
    r, v, u = float(y[0]), float(y[1]), float(y[2])
    if epsilon == 0:
        # continuous extension of alpha r^(alpha+2) / r^(alpha+2)
        pull = alpha
    else:
        ra = abs(r)
        pull = alpha * ra ** (alpha + 2) * (ra * ra + epsilon * epsilon) ** (-alpha / 2 - 1)
    return (
        r * v,
        u * u + 0.5 * alpha * v * v - pull,
        0.5 * (alpha - 2) * u * v,
        u,
    )


def _amended_rates(y, alpha: float, epsilon: float, form: AmendedForm) -> Tuple[float, float, float, float]:
    """(r', v', u', theta') for the amended flavor in either written form."""
    r, v, u = float(y[0]), float(y[1]), float(y[2])
    ra = abs(r)
    s = ra * ra + epsilon * epsilon
    bracket = u * u + 0.5 * alpha * v * v - alpha
    k = 0.5 * (alpha - 2)
    dr = v * ra ** ((alpha + 2) / 2) * s ** (-alpha / 4)
    if form == AmendedForm.DERIVED:
        prefactor = ra ** ((alpha + 4) / 2) * s ** (-(alpha + 4) / 4)
        dv = prefactor * bracket
        du = k * prefactor * u * v
        dtheta = u * ra ** ((alpha + 2) / 2) * s ** (-(alpha + 2) / 4)
    else:
        dv = ra ** ((alpha + 4) / 2) * s ** (-(alpha + 4) / 2) * bracket
        du = k * ra ** ((alpha + 2) / 4) * s ** (-(alpha + 4) / 4) * u * v
        dtheta = u * ra ** ((alpha + 2) / 4) * s ** (-(alpha + 2) / 4)
    return dr, dv, du, dtheta


def _rates_for(spec: PotentialSpec) -> Callable:
    if spec.is_amended:
        return functools.partial(_amended_rates, alpha=spec.alpha, epsilon=spec.epsilon, form=spec.amended_form)
    return functools.partial(_plain_rates, alpha=spec.alpha, epsilon=spec.epsilon)


def make_rhs(spec: PotentialSpec, full_state: bool = False) -> Callable[[float, np.ndarray], np.ndarray]:
    """Solver right-hand side fun(tau, y) on (r, v, u) or (r, v, u, theta)."""
    rates = _rates_for(spec)

    def rhs(tau, y):
        dr, dv, du, dtheta = rates(y)
        if full_state:
            return np.array([dr, dv, du, dtheta])
        return np.array([dr, dv, du])

    return rhs


def regularized_field(state: McGeheeState, spec: PotentialSpec) -> np.ndarray:
    """Derivative of (r, v, u, theta) with respect to tau."""
    return np.array(_rates_for(spec)(state.as_array()))


def reduced_field(state: ReducedState, spec: PotentialSpec) -> np.ndarray:
    """Derivative of (r, v, u) with respect to tau."""
    return np.array(_rates_for(spec)(state.as_array())[:3])


@functools.lru_cache(maxsize=None)
def _check_printed_amended_form(alpha: float, epsilon: float) -> float:
    """Compare both amended forms at a reference state; warn once per (alpha, epsilon)."""
    reference = np.array([0.5, 0.3, 0.7])
    derived = np.array(_amended_rates(reference, alpha, epsilon, AmendedForm.DERIVED))
    printed = np.array(_amended_rates(reference, alpha, epsilon, AmendedForm.PRINTED))
    mismatch = float(np.max(np.abs(derived - printed)))
    if mismatch > _MISMATCH_TOL:
        logger.warning(
            "printed amended field differs from the derived one at alpha=%g, epsilon=%g (max |delta| = %.3g)",
            alpha, epsilon, mismatch,
        )
    return mismatch


def energy_residuals(states: np.ndarray, spec: PotentialSpec, h: EnergyLevel) -> np.ndarray:
    """u^2 + v^2 - f(r) for each row of (r, v, u)."""
    states = np.atleast_2d(states)
    r = np.clip(states[:, 0], 0.0, None)
    return states[:, 1] ** 2 + states[:, 2] ** 2 - energy_profile(r, spec, h)


def surface_residual(state: State, spec: PotentialSpec, h: EnergyLevel) -> float:
    return float(energy_residuals(state.as_array()[:3], spec, h)[0])


def momentum_invariant(states: np.ndarray, spec: PotentialSpec) -> np.ndarray:
    """
    u r^((2-alpha)/2), or u (r^2 + eps^2)^(-(alpha-2)/4) for the amended flavor.
    NaN where undefined (r = 0 with alpha > 2).
    """
    states = np.atleast_2d(states)
    r = np.clip(states[:, 0], 0.0, None)
    u = states[:, 2]
    if spec.is_amended:
        return u * (r * r + spec.epsilon ** 2) ** (-(spec.alpha - 2) / 4)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = u * r ** ((2 - spec.alpha) / 2)
    value[~np.isfinite(value)] = np.nan
    return value


def _drift(states: np.ndarray, spec: PotentialSpec, h: EnergyLevel) -> DriftReport:
    energy = float(np.max(np.abs(energy_residuals(states, spec, h))))
    invariant = momentum_invariant(states, spec)
    finite = invariant[np.isfinite(invariant)]
    momentum = float(np.max(np.abs(finite - finite[0]))) if len(finite) else 0.0
    return DriftReport(max_energy_residual=energy, max_momentum_residual=momentum)


def drift_report(traj: Trajectory, spec: PotentialSpec, h: EnergyLevel) -> DriftReport:
    """Worst energy-surface residual and momentum-invariant drift over the samples."""
    return _drift(traj.states, spec, h)


def project_onto_surface(state: State, spec: PotentialSpec, h: EnergyLevel) -> State:
    """Rescale (u, v) so that u^2 + v^2 = f(r)."""
    f = energy_profile(state.r, spec, h)
    if f < 0:
        raise DomainError(f"r = {state.r} lies beyond the maximal radius")
    norm2 = state.u ** 2 + state.v ** 2
    if norm2 == 0:
        if f == 0:
            return state
        raise DomainError("cannot project a state with u = v = 0 onto f(r) > 0")
    scale = math.sqrt(f / norm2)
    return state.model_copy(update={"u": state.u * scale, "v": state.v * scale})


class _EventMonitor:
    """
    Sign-change event detection between solver steps, polished on the dense output.
    """

    def __init__(self, spec: PotentialSpec, h: EnergyLevel, y0: np.ndarray, opts: IntegrationOptions, full_state: bool):
        self.opts = opts
        self.full_state = full_state
        self.r_max = max_radius(spec, h)
        self.f0 = energy_profile(0.0, spec, h)
        self.reduced_rhs = make_rhs(spec)
        self.s0 = np.array(y0[:3], dtype=float)
        closure_scale = max(1.0, float(np.linalg.norm(self.s0)))
        self.closure_radius = opts.closure_tol * closure_scale
        self.depart_radius = CLOSURE_DEPART_FACTOR * self.closure_radius
        self.departed = False
        self.arm_level = EVENT_ARM_FACTOR * opts.event_tol
        self.armed = abs(y0[1]) > self.arm_level
        self.collision_radius = opts.collision_radius_factor * self.r_max
        self.collision_seen = False
        self.last_gauge = self._closure_gauge(self.s0)

    def _closure_gauge(self, y) -> float:
        """Half the tau-derivative of the squared distance to the start."""
        return float(np.dot(np.asarray(y[:3]) - self.s0, self.reduced_rhs(0.0, y[:3])))

    def _event(self, kind: EventKind, tau: float, y) -> Event:
        theta = float(y[3] % (2 * math.pi)) if self.full_state else None
        return Event(kind=kind, tau=float(tau), state=ReducedState(r=max(float(y[0]), 0.0), v=float(y[1]), u=float(y[2])), theta=theta)

    def _turning_events(self, tau: float, y) -> List[Event]:
        if y[0] <= 0:
            return []
        events = [self._event(EventKind.TURNING_POINT, tau, y)]
        if abs(y[0] - self.r_max) < _MAX_RADIUS_TOUCH_FACTOR * self.r_max:
            events.append(self._event(EventKind.MAX_RADIUS_TOUCH, tau, y))
        return events

    def initial_events(self, tau0: float, y0) -> List[Event]:
        if abs(y0[1]) < self.opts.event_tol:
            return self._turning_events(tau0, y0)
        return []

    @staticmethod
    def _polish(func, t_old: float, t_new: float, value_new: float) -> float:
        if value_new == 0:
            return t_new
        a, b = min(t_old, t_new), max(t_old, t_new)
        return brentq(func, a, b, xtol=_ROOT_XTOL)

    def scan(self, t_old: float, t_new: float, y_old: np.ndarray, y_new: np.ndarray, dense) -> List[Event]:
        """Events strictly after t_old up to t_new, in integration order."""
        found = []

        v_old, v_new = y_old[1], y_new[1]
        if self.armed and v_old != 0 and v_old * v_new <= 0:
            tau_star = self._polish(lambda t: dense(t)[1], t_old, t_new, v_new)
            found.extend(self._turning_events(tau_star, dense(tau_star)))
            self.armed = False
        if abs(v_new) > self.arm_level:
            self.armed = True

        threshold = self.collision_radius
        if not self.collision_seen and y_old[0] >= threshold > y_new[0]:
            tau_star = self._polish(lambda t: dense(t)[0] - threshold, t_old, t_new, y_new[0] - threshold)
            y_star = dense(tau_star)
            if abs(y_star[1] ** 2 + y_star[2] ** 2 - self.f0) < self.opts.collision_energy_tol:
                found.append(self._event(EventKind.COLLISION_APPROACH, tau_star, y_star))
                self.collision_seen = True

        gauge_old, gauge_new = self.last_gauge, self._closure_gauge(y_new)
        if self.departed and gauge_old < 0 <= gauge_new:
            tau_star = self._polish(lambda t: self._closure_gauge(dense(t)), t_old, t_new, gauge_new)
            y_star = dense(tau_star)
            if np.linalg.norm(y_star[:3] - self.s0) < self.closure_radius:
                found.append(self._event(EventKind.PERIOD_CLOSURE, tau_star, y_star))
        self.last_gauge = gauge_new
        if np.linalg.norm(y_new[:3] - self.s0) > self.depart_radius:
            self.departed = True

        direction = 1.0 if t_new > t_old else -1.0
        found.sort(key=lambda event: direction * event.tau)
        return found


def integrate(
    spec: PotentialSpec,
    h: EnergyLevel,
    s0: State,
    tau_span: Sequence[float],
    opts: Optional[IntegrationOptions] = None,
) -> Trajectory:
    """
    Integrate the regularized field from s0 over tau_span.

    A ReducedState start integrates the reduced field; a McGeheeState start also
    carries theta. tau_span may run backward. The start must lie on the energy
    surface of h within SURFACE_TOL.
    """
    opts = opts or IntegrationOptions()
    check_softening(spec, h)
    tau0, tau1 = float(tau_span[0]), float(tau_span[1])
    if not (math.isfinite(tau0) and math.isfinite(tau1)) or tau0 == tau1:
        raise DomainError("tau_span must be finite with distinct endpoints")

    full_state = isinstance(s0, McGeheeState)
    y0 = s0.as_array()
    residual = abs(surface_residual(s0, spec, h))
    if residual > SURFACE_TOL:
        raise EnergyViolation(f"initial state is off the energy surface: |u^2 + v^2 - f(r)| = {residual:.3e}")
    if spec.is_amended:
        _check_printed_amended_form(spec.alpha, spec.epsilon)

    atol = np.full(len(y0), opts.atol)
    atol[0] = opts.radial_atol
    solver = _SOLVERS[opts.method](
        make_rhs(spec, full_state), tau0, y0, tau1, rtol=opts.rtol, atol=atol, max_step=opts.max_step
    )
    monitor = _EventMonitor(spec, h, y0, opts, full_state)

    taus = [tau0]
    ys = [y0.copy()]
    interpolants = []
    events = monitor.initial_events(tau0, y0)

    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            raise StepFailure(f"solver failed at tau={solver.t:.6g}: {message}")
        if solver.status == "running" and solver.step_size < opts.min_step:
            raise StepFailure(f"step size {solver.step_size:.3e} below floor {opts.min_step:.1e} at tau={solver.t:.6g}")

        dense = solver.dense_output()
        step_events = monitor.scan(solver.t_old, solver.t, ys[-1], solver.y, dense)
        terminal = next((event for event in step_events if event.kind in opts.terminal), None)
        if terminal is None:
            events.extend(step_events)
            interpolants.append(dense)
            taus.append(solver.t)
            ys.append(solver.y.copy())
            continue

        events.extend(event for event in step_events if event.tau * (tau1 - tau0) <= terminal.tau * (tau1 - tau0))
        if terminal.tau != taus[-1]:
            interpolants.append(dense)
            taus.append(terminal.tau)
            ys.append(dense(terminal.tau))
        logger.debug("terminal %s at tau=%.6g", terminal.kind.value, terminal.tau)
        break

    states = np.array(ys)
    theta = windings = None
    if full_state:
        raw = states[:, 3]
        theta = np.mod(raw, 2 * math.pi)
        windings = np.floor(raw / (2 * math.pi)).astype(int)
        states = states[:, :3]

    return Trajectory(
        spec=spec,
        h=h,
        tau=np.array(taus),
        states=states,
        theta=theta,
        windings=windings,
        events=events,
        drift=_drift(states, spec, h),
        direction=1 if tau1 > tau0 else -1,
        dense=OdeSolution(taus, interpolants) if interpolants else None,
    )


def compare_amended_forms(
    spec: PotentialSpec,
    h: EnergyLevel,
    state: ReducedState,
    tau: float,
    opts: Optional[IntegrationOptions] = None,
) -> Dict[AmendedForm, DriftReport]:
    """Integrate the derived and printed amended fields from one start and report both drifts."""
    if not spec.is_amended:
        raise FlavorError("amended forms exist only for the amended flavor")
    reports = {}
    for form in AmendedForm:
        variant = spec.model_copy(update={"amended_form": form})
        reports[form] = integrate(variant, h, state, (0.0, tau), opts).drift
    return reports


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    """Export table: tau, r, v, u[, theta], energy_residual."""
    frame = pd.DataFrame({"tau": traj.tau, "r": traj.r, "v": traj.v, "u": traj.u})
    if traj.theta is not None:
        frame["theta"] = traj.theta
    frame["energy_residual"] = energy_residuals(traj.states, traj.spec, traj.h)
    return frame


def trajectory_events(traj: Trajectory) -> List[dict]:
    return [event.to_record() for event in traj.events]
