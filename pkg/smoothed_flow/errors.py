"""
Error taxonomy shared by the library and the command line.
"""


class SmoothedFlowError(Exception):
    """Base class for every error raised by this package."""


class ValidationFailure(SmoothedFlowError):
    """Inputs violate a precondition (command line exit code 2)."""


class DomainError(ValidationFailure):
    """Evaluation requested outside the domain of a formula or transform."""


class InvalidSoftening(ValidationFailure):
    """|h| * epsilon^alpha >= 1: the energy level does not bound r."""


class FlavorError(ValidationFailure):
    """Operation is undefined for the requested smoothing flavor."""


class InadmissibleMomentum(ValidationFailure):
    """Angular momentum exceeds the admissible bound of the amended flavor."""


class EnergyViolation(ValidationFailure):
    """Initial state is off the declared energy surface."""


class NumericFailure(SmoothedFlowError):
    """A numerical procedure could not reach its target (exit code 4)."""


class StepFailure(NumericFailure):
    """Integrator step size fell below the floor or the solver failed."""


class QuadratureError(NumericFailure):
    """Physical-time quadrature did not meet its tolerance."""


class RootBracketFailure(NumericFailure):
    """No sign change where one must exist."""


class Inconclusive(NumericFailure):
    """Integration ended without closure or collision approach."""


class ClassificationError(SmoothedFlowError):
    """Root structure does not determine an orbit type."""


class TangencyAmbiguous(ClassificationError):
    """Two roots closer than the separation floor but not a clean tangency."""


class RootCountError(ClassificationError):
    """More intersections than any orbit type allows."""


class SingularityError(DomainError):
    """Unsmoothed Cartesian field evaluated at the origin."""
