"""
Orbit classification at fixed (h, c).

classify_orbit isolates the zeros of D(r) = f(r) - u_c(r)^2 on (0, R_max];
classify_by_integration is an independent check that integrates the orbit through
its outermost turning point and reads the type off the event log.
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .config import (
    DISTINCT_RADIUS_FACTOR,
    ORACLE_BUDGET_GROWTH,
    ORACLE_MAX_ROUNDS,
    ORACLE_TAU_SPAN,
    ROOT_SEARCH_FLOOR,
    ROOT_SEPARATION_FACTOR,
    SCAN_FLOOR,
    SCAN_POINTS,
    STATIONARY_TOL,
    TANGENCY_SLOPE_TOL,
    TANGENCY_STEP_FACTOR,
    TANGENCY_VALUE_TOL,
)
from .dynamics import integrate
from .errors import InadmissibleMomentum, Inconclusive, RootBracketFailure, RootCountError, TangencyAmbiguous
from .models import (
    AngularMomentum,
    EnergyLevel,
    EventKind,
    IntegrationOptions,
    OrbitClass,
    OrbitTag,
    PotentialSpec,
    ReducedState,
    Trajectory,
)
from .potential import admissible_c_bound, check_softening, energy_profile, max_radius, momentum_curve

logger = logging.getLogger(__name__)

_XTOL = 1e-300
_SEARCH_SHRINK = 1e-3


def momentum_gap(r, spec: PotentialSpec, h: EnergyLevel, c: AngularMomentum):
    """D(r) = f(r) - u_c(r)^2; positive where the orbit can move."""
    return energy_profile(r, spec, h) - momentum_curve(r, spec, c) ** 2


def scaled_gap(r, spec: PotentialSpec, h: EnergyLevel, c: float):
    """
    Same sign and zeros as D(r) on r > 0, without the power that makes D blow up at 0:
    D = r^(alpha-2) E for non-amended flavors, D = s^((alpha-2)/2) E for amended (s = r^2 + eps^2).
    """
    r = np.asarray(r, dtype=float)
    a, eps, hm = spec.alpha, spec.epsilon, h.magnitude
    s = r * r + eps * eps
    if spec.is_amended:
        return 2 * s ** (1 - a / 2) - 2 * hm * s - c * c
    if eps == 0:
        return 2 * r ** (2 - a) - 2 * hm * r * r - c * c
    return 2 * r * r * s ** (-a / 2) - 2 * hm * r * r - c * c


def near_origin_sign(spec: PotentialSpec, h: EnergyLevel, c: float) -> int:
    """Sign of D as r -> 0+, from the leading-order exponents rather than tiny-r evaluation."""
    a = spec.alpha
    if spec.is_amended:
        eps = spec.epsilon
        return int(np.sign(2 * (1 - h.magnitude * eps ** a) - c * c * eps ** (a - 2)))
    if spec.epsilon > 0:
        return -1
    if a < 2:
        return -1
    if a == 2:
        return int(np.sign(2 - c * c))
    return 1


def _scan_grid(r_max: float) -> np.ndarray:
    return np.geomspace(SCAN_FLOOR * r_max, r_max, SCAN_POINTS)


def _extend_below(grid: np.ndarray, target_sign: int, gap) -> np.ndarray:
    """Prepend smaller radii until the gap takes its limiting sign near 0."""
    extra = []
    r = grid[0]
    while np.sign(gap(r)) != target_sign:
        r *= _SEARCH_SHRINK
        if r < ROOT_SEARCH_FLOOR:
            raise RootBracketFailure("limiting sign near r = 0 not reached above the search floor")
        extra.append(r)
    if not extra:
        return grid
    logger.debug("root below the scan floor; extended grid down to r=%.3e", extra[-1])
    return np.concatenate((np.array(extra[::-1]), grid))


def _sign_change_roots(grid: np.ndarray, values: np.ndarray, gap) -> List[float]:
    roots = []
    signs = np.sign(values)
    for i in range(len(grid) - 1):
        if signs[i] == 0:
            if 0 < i:
                roots.append(float(grid[i]))
            continue
        if signs[i] * signs[i + 1] < 0:
            roots.append(float(brentq(gap, grid[i], grid[i + 1], xtol=_XTOL)))
    return roots


def _tangencies(grid: np.ndarray, values: np.ndarray, gap, exact_gap, r_max: float) -> List[float]:
    """Interior extrema of the gap that touch zero with vanishing slope."""
    step = TANGENCY_STEP_FACTOR * r_max
    found = []
    for i in range(1, len(grid) - 1):
        is_max = values[i] > values[i - 1] and values[i] >= values[i + 1]
        is_min = values[i] < values[i - 1] and values[i] <= values[i + 1]
        if not (is_max or is_min):
            continue
        sign = -1.0 if is_max else 1.0
        result = minimize_scalar(lambda r: sign * gap(r), bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                                 options={"xatol": 1e-14 * r_max})
        r_star = float(result.x)
        lower = max(r_star - step, 0.5 * r_star)
        slope = (exact_gap(r_star + step) - exact_gap(lower)) / (r_star + step - lower)
        if abs(exact_gap(r_star)) < TANGENCY_VALUE_TOL and abs(slope) < TANGENCY_SLOPE_TOL:
            found.append(r_star)
    return found


def _isolate_roots(spec: PotentialSpec, h: EnergyLevel, c: AngularMomentum, r_max: float) -> Tuple[int, List[float], List[float]]:
    """(near-origin sign, transversal roots, tangency radii) of D on (0, R_max)."""
    gap = lambda r: float(scaled_gap(r, spec, h, c.c))
    exact_gap = lambda r: float(momentum_gap(r, spec, h, c))

    grid = _scan_grid(r_max)
    sign = near_origin_sign(spec, h, c.c)
    if sign == 0:
        sign = int(np.sign(gap(grid[0]))) or -1
    grid = _extend_below(grid, sign, gap)
    values = scaled_gap(grid, spec, h, c.c)

    roots = _sign_change_roots(grid, values, gap)
    tangencies = _tangencies(grid, values, gap, exact_gap, r_max)

    separation = ROOT_SEPARATION_FACTOR * r_max
    for r_t in tangencies:
        roots = [r for r in roots if abs(r - r_t) >= separation]
    for left, right in zip(roots[:-1], roots[1:]):
        if right - left < separation:
            raise TangencyAmbiguous(f"roots {left:.12g} and {right:.12g} closer than {separation:.3g} without a clean tangency")
    logger.debug("gap roots %s, tangencies %s (sign near 0: %d)", roots, tangencies, sign)
    return sign, roots, tangencies


def check_admissible(spec: PotentialSpec, h: EnergyLevel, c: AngularMomentum) -> None:
    """Amended flavor with alpha >= 2: c must not exceed the admissible bound."""
    if spec.is_amended and spec.alpha >= 2:
        bound = admissible_c_bound(spec, h)
        if c.c > bound:
            raise InadmissibleMomentum(f"c exceeds admissible bound: c = {c.c:.12g} > {bound:.12g}")


def classify_orbit(spec: PotentialSpec, h: EnergyLevel, c: AngularMomentum) -> OrbitClass:
    """
    Orbit type from the intersections of the energy curve with the momentum curve:
    one root with D > 0 near 0 is a collision-ejection orbit, two roots with D < 0
    near 0 a periodic orbit, a double root a relative equilibrium, none an empty level.
    """
    r_max = max_radius(spec, h)
    check_admissible(spec, h, c)
    if c.c == 0:
        return OrbitClass(tag=OrbitTag.SPINLESS_COLLISION_EJECTION, turning_radii=[r_max])

    sign, roots, tangencies = _isolate_roots(spec, h, c, r_max)
    if tangencies:
        if len(tangencies) == 1 and not roots:
            return OrbitClass(tag=OrbitTag.RELATIVE_EQUILIBRIUM, turning_radii=tangencies, tangency=True)
        raise TangencyAmbiguous(f"tangency at {tangencies} alongside transversal roots {roots}")

    if sign > 0 and len(roots) == 1:
        return OrbitClass(tag=OrbitTag.COLLISION_EJECTION, turning_radii=roots)
    if sign < 0 and len(roots) == 2:
        return OrbitClass(tag=OrbitTag.PERIODIC, turning_radii=roots)
    if sign < 0 and not roots:
        return OrbitClass(tag=OrbitTag.VOID)
    raise RootCountError(f"{len(roots)} roots with sign {sign:+d} near r = 0 (c = {c.c:.12g})")


def outermost_turning_radius(spec: PotentialSpec, h: EnergyLevel, c: AngularMomentum) -> Optional[float]:
    """Largest r with D(r) = 0 and D > 0 just inside it; None when D <= 0 everywhere."""
    r_max = max_radius(spec, h)
    if c.c == 0:
        return r_max
    gap = lambda r: float(scaled_gap(r, spec, h, c.c))
    grid = _scan_grid(r_max)
    values = scaled_gap(grid, spec, h, c.c)
    positive = np.nonzero(values > 0)[0]
    if len(positive) == 0:
        top = int(np.argmax(values))
        if 0 < top < len(grid) - 1:
            result = minimize_scalar(lambda r: -gap(r), bounds=(grid[top - 1], grid[top + 1]), method="bounded",
                                     options={"xatol": 1e-14 * r_max})
            r_star = float(result.x)
            if -result.fun >= 0 or abs(float(momentum_gap(r_star, spec, h, c))) < TANGENCY_VALUE_TOL:
                return r_star
        return None
    last = int(positive[-1])
    if last == len(grid) - 1:
        return float(grid[-1])
    return float(brentq(gap, grid[last], grid[last + 1], xtol=_XTOL))


def _distinct_radii(radii: List[float], tol: float) -> List[float]:
    distinct = []
    for r in sorted(radii):
        if not distinct or r - distinct[-1] > tol:
            distinct.append(r)
    return distinct


def _turning_radii(traj: Trajectory) -> List[float]:
    return [event.state.r for event in traj.events_of(EventKind.TURNING_POINT)]


def _bounce_guaranteed(spec: PotentialSpec, c: AngularMomentum) -> bool:
    return c.c > 0 and not spec.is_amended and spec.alpha < 2


def classify_by_integration(
    spec: PotentialSpec,
    h: EnergyLevel,
    c: AngularMomentum,
    tau_span: float = ORACLE_TAU_SPAN,
    opts: Optional[IntegrationOptions] = None,
) -> OrbitClass:
    """
    Integrate from the outermost turning point and classify from the event log:
    closure after two distinct turning radii is periodic, collision approach in both
    time directions is a collision-ejection orbit, a motionless start is a relative
    equilibrium. The tau budget grows while the orbit is still on its first fall.

    Without amended smoothing, alpha < 2 and c > 0 make u_c blow up at r = 0, so the
    orbit must turn before collision; there a close approach to r = 0 is integrated
    through rather than treated as a collision.
    """
    r_max = max_radius(spec, h)
    check_admissible(spec, h, c)
    r_out = outermost_turning_radius(spec, h, c)
    if r_out is None:
        return OrbitClass(tag=OrbitTag.VOID)

    u_out = float(momentum_curve(r_out, spec, c))
    s0 = ReducedState(r=r_out, v=0.0, u=u_out)
    bounces = _bounce_guaranteed(spec, c)
    terminal = (EventKind.PERIOD_CLOSURE,) if bounces else (EventKind.COLLISION_APPROACH, EventKind.PERIOD_CLOSURE)
    base = opts or IntegrationOptions()
    opts = base.model_copy(update={"terminal": terminal})
    distinct_tol = DISTINCT_RADIUS_FACTOR * r_max

    for round_index in range(ORACLE_MAX_ROUNDS + 1):
        span = tau_span * ORACLE_BUDGET_GROWTH ** round_index
        forward = integrate(spec, h, s0, (0.0, span), opts)

        if round_index == 0:
            deviation = float(np.max(np.abs(forward.states - s0.as_array())))
            if deviation < STATIONARY_TOL:
                return OrbitClass(tag=OrbitTag.RELATIVE_EQUILIBRIUM, turning_radii=[r_out], tangency=True)

        if forward.events_of(EventKind.PERIOD_CLOSURE):
            radii = _distinct_radii(_turning_radii(forward), distinct_tol)
            if len(radii) == 2:
                return OrbitClass(tag=OrbitTag.PERIODIC, turning_radii=radii)
            raise Inconclusive(f"closure with turning radii {radii}")

        if not bounces and forward.events_of(EventKind.COLLISION_APPROACH):
            backward = integrate(spec, h, s0, (0.0, -span), opts)
            if backward.events_of(EventKind.COLLISION_APPROACH):
                tag = OrbitTag.COLLISION_EJECTION if c.c > 0 else OrbitTag.SPINLESS_COLLISION_EJECTION
                return OrbitClass(tag=tag, turning_radii=[r_out])
            raise Inconclusive("collision approach forward but not backward")

        later_turns = [event for event in forward.events_of(EventKind.TURNING_POINT) if event.tau > 0]
        if len(later_turns) >= 2:
            raise Inconclusive(f"{len(later_turns)} turning points without closure or collision")
        logger.debug("oracle round %d: no terminal event within tau=%.3g, growing budget", round_index, span)

    raise Inconclusive(f"no closure or collision approach within tau={span:.3g}")
