"""
Data Models for smoothed central-field flows
Pydantic models for problem parameters, phase-space states, trajectories and reports
"""

import math
from enum import Enum
from pathlib import Path
from typing import Any, ClassVar, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import (
    DEFAULT_ATOL,
    DEFAULT_METHOD,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_RTOL,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    CLOSURE_TOL,
    COLLISION_ENERGY_TOL,
    COLLISION_RADIUS_FACTOR,
    EVENT_TOL,
    MIN_STEP,
    ORACLE_TAU_SPAN,
    PORTRAIT_POINTS,
    RADIAL_ATOL,
    SCHEMA_VERSION,
)


class Flavor(str, Enum):
    """Smoothing applied to the potential."""
    NON_SMOOTHED = "none"
    PLAIN_SMOOTHED = "plain"
    AMENDED_SMOOTHED = "amended"


class AmendedForm(str, Enum):
    """Which written-out amended vector field to evaluate."""
    DERIVED = "derived"
    PRINTED = "printed"


class PotentialSpec(BaseModel):
    """
    Problem definition: exponent, softening length and smoothing flavor.
    """
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0, description="Homogeneity exponent of -1/r^alpha")
    epsilon: float = Field(0.0, ge=0, description="Softening length")
    flavor: Flavor = Field(Flavor.NON_SMOOTHED, description="Smoothing flavor")
    amended_form: AmendedForm = Field(AmendedForm.DERIVED, description="Amended field variant (amended flavor only)")

    @field_validator("alpha", "epsilon")
    @classmethod
    def validate_finite(cls, v):
        """Reject NaN and infinities"""
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @model_validator(mode="after")
    def validate_flavor_softening(self):
        """epsilon is zero exactly for the non-smoothed flavor"""
        if self.flavor == Flavor.NON_SMOOTHED and self.epsilon != 0:
            raise ValueError("flavor 'none' requires epsilon = 0")
        if self.flavor != Flavor.NON_SMOOTHED and self.epsilon == 0:
            raise ValueError(f"flavor '{self.flavor.value}' requires epsilon > 0")
        return self

    @property
    def is_amended(self) -> bool:
        return self.flavor == Flavor.AMENDED_SMOOTHED

    @property
    def outside_validated_scope(self) -> bool:
        """Amended smoothing is only analysed for alpha >= 2."""
        return self.is_amended and self.alpha < 2

    def unsmoothed(self) -> "PotentialSpec":
        """The same exponent without softening."""
        return PotentialSpec(alpha=self.alpha)


class EnergyLevel(BaseModel):
    """Fixed total energy h of the level set under study."""
    model_config = ConfigDict(frozen=True)

    h: float = Field(..., description="Total energy (negative)")

    @field_validator("h")
    @classmethod
    def validate_negative(cls, v):
        """Only bound (negative-energy) motion is analysed"""
        if not math.isfinite(v) or v >= 0:
            raise ValueError("h must be negative")
        return v

    @property
    def magnitude(self) -> float:
        return -self.h


class AngularMomentum(BaseModel):
    """
    Non-negative angular momentum c; negative inputs are reflected u -> -u
    """
    model_config = ConfigDict(frozen=True)

    c: float = Field(..., ge=0, description="Angular momentum magnitude")
    reflected: bool = Field(False, description="Whether the caller supplied -c")

    @classmethod
    def from_signed(cls, c: float) -> "AngularMomentum":
        return cls(c=abs(c), reflected=c < 0)


class _StateModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    COLUMNS: ClassVar[Tuple[str, ...]] = ()

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in self.COLUMNS], dtype=float)

    @classmethod
    def from_array(cls, values):
        return cls(**{name: float(value) for name, value in zip(cls.COLUMNS, values)})


class CartesianState(_StateModel):
    """Position and momentum in the plane."""
    COLUMNS: ClassVar[Tuple[str, ...]] = ("x", "y", "px", "py")

    x: float
    y: float
    px: float
    py: float


class PolarState(_StateModel):
    """Polar coordinates with conjugate momenta; theta kept in [0, 2*pi)."""
    COLUMNS: ClassVar[Tuple[str, ...]] = ("r", "theta", "pr", "ptheta")

    r: float = Field(..., gt=0)
    theta: float = 0.0
    pr: float
    ptheta: float

    @field_validator("theta")
    @classmethod
    def wrap_angle(cls, v):
        return v % (2 * math.pi)


class McGeheeState(_StateModel):
    """
    Regularized coordinates (r, v, theta, u).
    Array order is (r, v, u, theta) so the first three columns match ReducedState.
    """
    COLUMNS: ClassVar[Tuple[str, ...]] = ("r", "v", "u", "theta")

    r: float = Field(..., ge=0)
    v: float
    theta: float = 0.0
    u: float

    @field_validator("theta")
    @classmethod
    def wrap_angle(cls, v):
        return v % (2 * math.pi)

    def reduced(self) -> "ReducedState":
        return ReducedState(r=self.r, v=self.v, u=self.u)


class ReducedState(_StateModel):
    """Point (r, v, u) of the theta-factored phase space."""
    COLUMNS: ClassVar[Tuple[str, ...]] = ("r", "v", "u")

    r: float = Field(..., ge=0)
    v: float
    u: float


class EventKind(str, Enum):
    TURNING_POINT = "TurningPoint"
    COLLISION_APPROACH = "CollisionApproach"
    MAX_RADIUS_TOUCH = "MaxRadiusTouch"
    PERIOD_CLOSURE = "PeriodClosure"


class Event(BaseModel):
    """Localized event on a trajectory."""
    model_config = ConfigDict(frozen=True)

    kind: EventKind
    tau: float
    state: ReducedState
    theta: Optional[float] = Field(None, description="Angle at the event for full-state runs")

    def to_record(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "tau": self.tau, "r": self.state.r, "v": self.state.v, "u": self.state.u}


class DriftReport(BaseModel):
    """Worst deviation from the conserved quantities over a trajectory."""
    model_config = ConfigDict(frozen=True)

    max_energy_residual: float = Field(..., ge=0, description="max |u^2 + v^2 - f(r)|")
    max_momentum_residual: float = Field(..., ge=0, description="max drift of the momentum invariant")


class IntegrationOptions(BaseModel):
    """
    Step control and event settings for dynamics.integrate
    """
    model_config = ConfigDict(frozen=True)

    method: str = Field(DEFAULT_METHOD, description="Embedded Runge-Kutta pair: DOP853 or RK45")
    rtol: float = Field(DEFAULT_RTOL, gt=0)
    atol: float = Field(DEFAULT_ATOL, gt=0)
    radial_atol: float = Field(RADIAL_ATOL, gt=0, description="Absolute tolerance on r")
    max_step: float = Field(math.inf, gt=0)
    min_step: float = Field(MIN_STEP, gt=0)
    event_tol: float = Field(EVENT_TOL, gt=0)
    closure_tol: float = Field(CLOSURE_TOL, gt=0)
    collision_radius_factor: float = Field(COLLISION_RADIUS_FACTOR, gt=0)
    collision_energy_tol: float = Field(COLLISION_ENERGY_TOL, gt=0)
    terminal: Tuple[EventKind, ...] = Field((), description="Event kinds that stop the integration")

    @field_validator("method")
    @classmethod
    def validate_method(cls, v):
        if v not in ("DOP853", "RK45"):
            raise ValueError("method must be DOP853 or RK45")
        return v


class Trajectory(BaseModel):
    """
    Integrated orbit: tau samples at solver steps, states (r, v, u) per row,
    optional angle with winding counter, event log and drift report.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: PotentialSpec
    h: EnergyLevel
    tau: np.ndarray = Field(..., description="Rescaled time, strictly monotone in the integration direction")
    states: np.ndarray = Field(..., description="Rows of (r, v, u)")
    theta: Optional[np.ndarray] = Field(None, description="Angle reduced mod 2*pi")
    windings: Optional[np.ndarray] = Field(None, description="Completed turns since the start")
    events: List[Event] = Field(default_factory=list)
    drift: DriftReport
    direction: int = Field(1, description="+1 forward, -1 backward in tau")
    dense: Optional[Any] = Field(None, exclude=True, description="scipy OdeSolution over the run")

    @model_validator(mode="after")
    def validate_shapes(self):
        if self.states.ndim != 2 or self.states.shape[1] != 3:
            raise ValueError("states must have shape (n, 3)")
        if len(self.tau) != len(self.states) or len(self.tau) == 0:
            raise ValueError("tau and states must be nonempty and aligned")
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        if len(self.tau) > 1 and not np.all(np.diff(self.tau) * self.direction > 0):
            raise ValueError("tau must be strictly monotone in the integration direction")
        return self

    @property
    def is_full_state(self) -> bool:
        return self.theta is not None

    @property
    def r(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def v(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def u(self) -> np.ndarray:
        return self.states[:, 2]

    def samples(self):
        """Yield (tau, state) pairs."""
        for i, tau in enumerate(self.tau):
            r, v, u = self.states[i]
            if self.theta is None:
                yield float(tau), ReducedState(r=max(r, 0.0), v=v, u=u)
            else:
                yield float(tau), McGeheeState(r=max(r, 0.0), v=v, u=u, theta=self.theta[i])

    def events_of(self, kind: EventKind) -> List[Event]:
        return [event for event in self.events if event.kind == kind]

    def total_angle(self) -> Optional[np.ndarray]:
        """Unwrapped angle swept since the start."""
        if self.theta is None:
            return None
        return self.theta + 2 * math.pi * self.windings


class StabilityKind(str, Enum):
    CENTRE = "Centre"
    SADDLE = "Saddle"
    UNRESOLVED = "Unresolved"


class EquilibriumSource(str, Enum):
    CLOSED_FORM = "ClosedForm"
    ROOT_FIND = "RootFind"


class Equilibrium(BaseModel):
    """Relative equilibrium (circular orbit) of the reduced flow."""
    model_config = ConfigDict(frozen=True)

    r_e: float = Field(..., gt=0, description="Radius of the circular orbit")
    u_e: float = Field(..., description="Rescaled angular momentum (signed)")
    kind: StabilityKind
    source: EquilibriumSource
    eigenvalues: List[Tuple[float, float]] = Field(default_factory=list, description="(real, imag) of the surface spectrum")

    def state(self) -> ReducedState:
        return ReducedState(r=self.r_e, v=0.0, u=self.u_e)


class CollisionSet(BaseModel):
    """Fixed points on the collision set, or the radius of the amended collision circle."""
    model_config = ConfigDict(frozen=True)

    points: List[ReducedState] = Field(default_factory=list)
    manifold_radius: Optional[float] = Field(None, description="Radius of u^2 + v^2 = f(0) for the amended flavor")


class OrbitTag(str, Enum):
    VOID = "Void"
    PERIODIC = "Periodic"
    COLLISION_EJECTION = "CollisionEjection"
    SPINLESS_COLLISION_EJECTION = "SpinlessCollisionEjection"
    RELATIVE_EQUILIBRIUM = "RelativeEquilibrium"


_EXPECTED_RADII = {
    OrbitTag.VOID: 0,
    OrbitTag.PERIODIC: 2,
    OrbitTag.COLLISION_EJECTION: 1,
    OrbitTag.SPINLESS_COLLISION_EJECTION: 1,
    OrbitTag.RELATIVE_EQUILIBRIUM: 1,
}


class OrbitClass(BaseModel):
    """Qualitative orbit type for one (h, c)."""
    model_config = ConfigDict(frozen=True)

    tag: OrbitTag
    turning_radii: List[float] = Field(default_factory=list, description="Radii where v = 0, ascending")
    tangency: bool = False

    @field_validator("turning_radii")
    @classmethod
    def validate_radii(cls, v):
        if any(r <= 0 for r in v):
            raise ValueError("turning radii must be positive")
        return sorted(v)

    @model_validator(mode="after")
    def validate_tag_radii(self):
        expected = _EXPECTED_RADII[self.tag]
        if len(self.turning_radii) != expected:
            raise ValueError(f"{self.tag.value} requires {expected} turning radii, got {len(self.turning_radii)}")
        if self.tag == OrbitTag.RELATIVE_EQUILIBRIUM and not self.tangency:
            raise ValueError("RelativeEquilibrium requires tangency")
        return self


class Verdict(str, Enum):
    EQUIVALENT = "Equivalent"
    NOT_EQUIVALENT = "NotEquivalent"


class EquivalenceReport(BaseModel):
    """
    Comparison of the class functions c -> OrbitClass of two flows at one energy
    """
    model_config = ConfigDict(frozen=True)

    spec_a: PotentialSpec
    spec_b: PotentialSpec
    h: EnergyLevel
    n_samples: int = Field(..., gt=0)
    seed: int = DEFAULT_SEED
    c_samples: List[float] = Field(..., description="Sampled c for spec_a")
    c_samples_b: List[float] = Field(..., description="Sampled c for spec_b at the same quantiles")
    classes_a: List[Optional[OrbitClass]] = Field(..., description="None where classification was ambiguous")
    classes_b: List[Optional[OrbitClass]]
    verdict: Verdict
    witnesses: List[float] = Field(default_factory=list, description="spec_a c values where tags differ")
    excluded: List[float] = Field(default_factory=list, description="spec_a c values left out of the comparison")

    @model_validator(mode="after")
    def validate_verdict(self):
        if (self.verdict == Verdict.EQUIVALENT) != (len(self.witnesses) == 0):
            raise ValueError("verdict must be Equivalent exactly when there are no witnesses")
        if not (len(self.c_samples) == len(self.c_samples_b) == len(self.classes_a) == len(self.classes_b) == self.n_samples):
            raise ValueError("per-sample lists must have n_samples entries")
        return self

    @property
    def outside_validated_scope(self) -> bool:
        return self.spec_a.outside_validated_scope or self.spec_b.outside_validated_scope

    def to_document(self) -> Dict[str, Any]:
        """JSON-ready document with schema and seed header."""
        def tag(orbit: Optional[OrbitClass]) -> Optional[str]:
            return orbit.tag.value if orbit is not None else None

        return {
            "schema": SCHEMA_VERSION,
            "seed": self.seed,
            "alpha": self.spec_a.alpha,
            "h": self.h.h,
            "flavor_a": self.spec_a.flavor.value,
            "flavor_b": self.spec_b.flavor.value,
            "epsilon_a": self.spec_a.epsilon,
            "epsilon_b": self.spec_b.epsilon,
            "n_samples": self.n_samples,
            "verdict": self.verdict.value,
            "witnesses": list(self.witnesses),
            "excluded": list(self.excluded),
            "classes": [
                {"c": c_a, "c_b": c_b, "tag_a": tag(orbit_a), "tag_b": tag(orbit_b)}
                for c_a, c_b, orbit_a, orbit_b in zip(self.c_samples, self.c_samples_b, self.classes_a, self.classes_b)
            ],
            "outside_validated_scope": self.outside_validated_scope,
        }


class RunConfig(BaseModel):
    """
    Validated command-line configuration (flags merged over an optional config file)
    """
    command: str
    alpha: Optional[float] = Field(None, gt=0)
    h: Optional[float] = None
    epsilon: float = Field(0.0, ge=0)
    flavor: Optional[Flavor] = Field(None, description="Defaults to 'none' when epsilon = 0, otherwise 'plain'")
    c: float = 0.0
    seed: int = DEFAULT_SEED
    jobs: Optional[int] = Field(None, gt=0)
    out: Path = DEFAULT_OUTPUT_DIR
    verbose: bool = False
    # classify
    oracle: bool = False
    # portrait
    c_grid: Optional[str] = None
    points: int = Field(PORTRAIT_POINTS, ge=2)
    # equivalence
    sweep: bool = False
    assert_paper: bool = False
    flavor_b: Optional[Flavor] = Field(None, description="Smoothed flavor compared against the unsmoothed flow")
    samples: int = Field(DEFAULT_SAMPLES, gt=0)
    # simulate
    start: Optional[str] = Field(None, description="Named start point: equilibrium or turning")
    r0: Optional[float] = Field(None, ge=0)
    v0: Optional[float] = None
    u0: Optional[float] = None
    tau: float = Field(ORACLE_TAU_SPAN, description="Rescaled-time span (negative integrates backward)")
    project: bool = False
    full: bool = False
    max_step: Optional[float] = Field(None, gt=0)

    @field_validator("h")
    @classmethod
    def validate_h(cls, v):
        if v is not None and v >= 0:
            raise ValueError("h must be negative")
        return v

    @field_validator("start")
    @classmethod
    def validate_start(cls, v):
        if v is not None and v not in ("equilibrium", "turning"):
            raise ValueError("start must be 'equilibrium' or 'turning'")
        return v

    @field_validator("tau")
    @classmethod
    def validate_tau(cls, v):
        if v == 0 or not math.isfinite(v):
            raise ValueError("tau must be finite and nonzero")
        return v

    @model_validator(mode="after")
    def resolve_flavor(self):
        if not (self.command == "equivalence" and self.sweep):
            for name in ("alpha", "h"):
                if getattr(self, name) is None:
                    raise ValueError(f"{name} is required for {self.command}")
        if self.flavor is None:
            self.flavor = Flavor.NON_SMOOTHED if self.epsilon == 0 else Flavor.PLAIN_SMOOTHED
        if self.flavor == Flavor.NON_SMOOTHED and self.epsilon != 0:
            raise ValueError("flavor 'none' requires epsilon = 0")
        if self.flavor != Flavor.NON_SMOOTHED and self.epsilon == 0:
            raise ValueError(f"flavor '{self.flavor.value}' requires epsilon > 0")
        return self

    def potential_spec(self) -> PotentialSpec:
        return PotentialSpec(alpha=self.alpha, epsilon=self.epsilon, flavor=self.flavor)

    def energy_level(self) -> EnergyLevel:
        return EnergyLevel(h=self.h)

    def angular_momentum(self) -> AngularMomentum:
        return AngularMomentum.from_signed(self.c)

    def comparison_flavor(self) -> Flavor:
        """flavor_b, else the smoothed --flavor, else plain."""
        if self.flavor_b is not None:
            return self.flavor_b
        return self.flavor if self.flavor != Flavor.NON_SMOOTHED else Flavor.PLAIN_SMOOTHED

    def header(self) -> Dict[str, Any]:
        """Fields written at the top of every JSON document."""
        return {
            "schema": SCHEMA_VERSION,
            "seed": self.seed,
            "command": self.command,
            "alpha": self.alpha,
            "h": self.h,
            "epsilon": self.epsilon,
            "flavor": self.flavor.value,
        }
