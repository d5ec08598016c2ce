"""Exception hierarchy shared by all nanorod modules."""


class NanorodError(Exception):
    """Base class for all package errors."""


class InvalidInputError(NanorodError):
    """A physical or dimensionless parameter violates its invariant."""


class ConfigurationError(NanorodError):
    """A run-time configuration value is unusable (odd grid size, bad tolerance)."""


class SingularCurvatureError(InvalidInputError):
    """The initial-curvature radius vanishes somewhere on the rod."""


class SingularDenominatorError(NanorodError):
    """A load point lies on or beyond the constitutive singularity 1 - kappa*lambda2 = 0."""


class DomainError(NanorodError):
    """An evaluation or stencil left the admissible load region."""


class RootNotFoundError(NanorodError):
    """No sign change (or requested root index) inside the scanned bracket."""


class DegeneratePointError(NanorodError):
    """The implicit slope is undefined: d(residual)/d(lambda2) vanishes (fold)."""


class NoFoldError(NanorodError):
    """Newton iteration for a fold / stationary point did not converge."""


class DegenerateShapeError(NanorodError):
    """A closed-form mode or kernel denominator is numerically zero."""


class GridMismatchError(NanorodError):
    """Two sampled functions live on different grids."""


class InadmissibleSlopeError(NanorodError):
    """A sampled deflection has |dy/dt| >= 1 somewhere."""


class FoldPointError(NanorodError):
    """Reduction coefficients requested at a fold of the interaction curve."""


class ConstitutiveSingularityError(NanorodError):
    """The moment-curvature closure denominator vanished during integration."""

    def __init__(self, t, message=None):
        self.t = t
        super().__init__(message or f"constitutive denominator vanished at t = {t:.6f}")


class NoConvergenceError(NanorodError):
    """Shooting Newton iteration failed; carries the last iterate."""

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class RegimeError(NanorodError):
    """The tangent angle left (-pi/2, pi/2); the single-valued deflection regime ended."""


class AmplitudeSeedError(NanorodError):
    """No bifurcation amplitude is available to seed the nonlinear solve."""
