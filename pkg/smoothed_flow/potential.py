"""
Radial profiles of the smoothed problem.
Energy curve f(r), angular-momentum curve u_c(r), amended potential, the r-bound
and the admissible angular-momentum bound, plus the Hamiltonians they come from.

All profile functions accept a scalar or a numpy array for r and return the same shape.
"""

import numpy as np

from .errors import DomainError, FlavorError, InvalidSoftening, SingularityError
from .models import AngularMomentum, CartesianState, EnergyLevel, Flavor, PolarState, PotentialSpec


def _radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(np.isnan(r)):
        raise DomainError("r must be non-negative")
    return r


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def softening_product(spec: PotentialSpec, h: EnergyLevel) -> float:
    """|h| * epsilon^alpha; must stay below 1 for r to be bounded."""
    return h.magnitude * spec.epsilon ** spec.alpha


def check_softening(spec: PotentialSpec, h: EnergyLevel) -> None:
    """Raise InvalidSoftening unless |h| * epsilon^alpha < 1."""
    product = softening_product(spec, h)
    if product >= 1:
        raise InvalidSoftening(
            f"|h|*epsilon^alpha = {product:.6g} >= 1 for alpha={spec.alpha}, epsilon={spec.epsilon}, h={h.h}"
        )


def energy_profile(r, spec: PotentialSpec, h: EnergyLevel):
    """
    f(r) with u^2 + v^2 = f(r) on the energy surface.

    Non-smoothed flavor uses the continuous extension 2 - 2|h| r^alpha, so f(0) = 2.
    """
    r = _radius(r)
    a, eps, hm = spec.alpha, spec.epsilon, h.magnitude
    if spec.flavor == Flavor.NON_SMOOTHED:
        value = 2.0 - 2.0 * hm * r ** a
    elif spec.flavor == Flavor.PLAIN_SMOOTHED:
        s = r * r + eps * eps
        value = 2.0 * r ** a * (s ** (-a / 2) - hm)
    else:
        s = r * r + eps * eps
        value = 2.0 * (1.0 - hm * s ** (a / 2))
    return _out(value)


def energy_profile_slope(r, spec: PotentialSpec, h: EnergyLevel):
    """Analytic f'(r)."""
    r = _radius(r)
    a, eps, hm = spec.alpha, spec.epsilon, h.magnitude
    with np.errstate(divide="ignore"):
        if spec.flavor == Flavor.NON_SMOOTHED:
            value = -2.0 * a * hm * r ** (a - 1)
        elif spec.flavor == Flavor.PLAIN_SMOOTHED:
            s = r * r + eps * eps
            value = 2.0 * a * r ** (a - 1) * (eps * eps * s ** (-a / 2 - 1) - hm)
        else:
            s = r * r + eps * eps
            value = -2.0 * a * hm * r * s ** (a / 2 - 1)
    return _out(value)


def momentum_exponent(spec: PotentialSpec) -> float:
    """Power of r (or of r^2 + eps^2 for amended) in u_c."""
    if spec.is_amended:
        return (spec.alpha - 2) / 4
    return (spec.alpha - 2) / 2


def momentum_curve(r, spec: PotentialSpec, c: AngularMomentum):
    """
    u_c(r): c r^((alpha-2)/2), or c (r^2 + eps^2)^((alpha-2)/4) for the amended flavor.
    """
    r = _radius(r)
    if c.c == 0:
        return _out(np.zeros_like(r))
    k = momentum_exponent(spec)
    if spec.is_amended:
        value = c.c * (r * r + spec.epsilon ** 2) ** k
    else:
        if spec.alpha < 2 and np.any(r == 0):
            raise DomainError(f"u_c diverges at r = 0 for alpha = {spec.alpha} < 2")
        value = c.c * r ** k
    return _out(value)


def max_radius(spec: PotentialSpec, h: EnergyLevel) -> float:
    """R_max = sqrt(|h|^(-2/alpha) - eps^2), the zero of f."""
    check_softening(spec, h)
    return float(np.sqrt(h.magnitude ** (-2.0 / spec.alpha) - spec.epsilon ** 2))


def amended_potential(r, spec: PotentialSpec, c: AngularMomentum):
    """V(r) = c^2 / (2 (r^2 + eps^2)) - (r^2 + eps^2)^(-alpha/2)."""
    r = _radius(r)
    if spec.epsilon == 0 and np.any(r == 0):
        raise DomainError("amended potential is singular at r = 0 without softening")
    s = r * r + spec.epsilon ** 2
    return _out(c.c ** 2 / (2 * s) - s ** (-spec.alpha / 2))


def admissible_c_bound(spec: PotentialSpec, h: EnergyLevel) -> float:
    """
    Largest c with u_c(0) <= sqrt(f(0)) for the amended flavor:
    sqrt(2 (1 - |h| eps^alpha) / eps^(alpha - 2)).
    """
    if not spec.is_amended:
        raise FlavorError(f"admissible bound is defined for the amended flavor, not '{spec.flavor.value}'")
    product = softening_product(spec, h)
    if product > 1:
        check_softening(spec, h)
    return float(np.sqrt(2 * (1 - product) / spec.epsilon ** (spec.alpha - 2)))


def hamiltonian(state: CartesianState, spec: PotentialSpec) -> float:
    """H = |p|^2 / 2 - (x^2 + y^2 + eps^2)^(-alpha/2)."""
    if spec.is_amended:
        raise FlavorError("the amended flavor has no Cartesian Hamiltonian; use polar_hamiltonian")
    s = state.x ** 2 + state.y ** 2 + spec.epsilon ** 2
    if s == 0:
        raise SingularityError("potential is singular at the origin without softening")
    return 0.5 * (state.px ** 2 + state.py ** 2) - s ** (-spec.alpha / 2)


def polar_hamiltonian(state: PolarState, spec: PotentialSpec) -> float:
    """Radial Hamiltonian; the amended flavor smooths the centrifugal term too."""
    s = state.r ** 2 + spec.epsilon ** 2
    centrifugal = s if spec.is_amended else state.r ** 2
    return 0.5 * state.pr ** 2 + state.ptheta ** 2 / (2 * centrifugal) - s ** (-spec.alpha / 2)
