"""Exception hierarchy for nozzleflow solvers."""


class NozzleFlowError(Exception):
    """Base class for all solver errors."""


class DomainError(NozzleFlowError, ValueError):
    """Input outside the physical domain of an operation."""


class VacuumError(DomainError):
    """Bernoulli head too small for the requested speed (vacuum state)."""


class SupersonicInflow(DomainError):
    """Entrance state is not subsonic."""


class UnclassifiableThroat(NozzleFlowError):
    """Throat degeneracy not decidable from derivatives up to order six."""


class NoSubsonicCalibration(NozzleFlowError):
    """No subsonic entrance velocity produces a sonic throat."""


class NoRoot(NozzleFlowError):
    """Velocity equation has no root at this station (flow cannot pass)."""


class NotCalibrated(NozzleFlowError):
    """Entrance data do not place the sonic station at the throat."""


class SonicWindowDivergence(NozzleFlowError):
    """Desingularized fixed point near the throat failed to converge."""


class WrongThroatClass(NozzleFlowError):
    """Operation requires a different throat degeneracy class."""


class InsufficientPoints(NozzleFlowError):
    """Too few grid samples inside the requested fit window."""


class NotSupersonic(DomainError):
    """Upstream shock state is not supersonic."""


class ExitPressureOutOfRange(NozzleFlowError):
    """Requested exit pressure outside the attainable shock range."""


class NonMonotone(NozzleFlowError):
    """Exit pressure failed to vary monotonically with shock position."""


class SingularSystem(NozzleFlowError):
    """Direct factorization of the discrete system failed."""


class NonConvergent(NozzleFlowError):
    """Regularization continuation did not show Cauchy decrease."""


class NoMultiplier(NozzleFlowError):
    """No valid multiplier weight exists for these background curves."""


class TrustRegionExceeded(NozzleFlowError):
    """Iterate left the region where coefficients stay nondegenerate."""


class NoContraction(NozzleFlowError):
    """Fixed-point iteration stopped contracting."""


class NonMonotoneMach(NozzleFlowError):
    """Squared Mach number is not increasing along a streamwise line."""


class NonMonotoneEntrance(NozzleFlowError):
    """Entrance stream-function profile is not strictly increasing."""


class ConfigError(NozzleFlowError):
    """Run configuration failed to parse or validate."""
