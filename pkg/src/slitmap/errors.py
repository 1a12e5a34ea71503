"""Exception types raised across the toolkit.

Every failure mode named in a contract gets its own class so callers and
tests can discriminate; all inherit from SlitmapError.
"""


class SlitmapError(Exception):
    """Base class for all toolkit errors."""


class InvalidDomainError(SlitmapError):
    """A geometric invariant of a curve, domain, or slit annulus is violated."""


class BoundaryProximityError(SlitmapError):
    """Point is closer to a boundary than the sampling resolution; membership
    or evaluation there is indeterminate."""


class DegenerateTripleError(SlitmapError):
    """Three prescribed points for a fractional-linear map are not pairwise
    distinct on the sphere."""


class NoCommonPairError(SlitmapError):
    """Two circles intersect or are tangent, so no common symmetric pair exists."""


class DegenerateConfigurationError(SlitmapError):
    """Symmetric points of a circular domain failed the distinctness count;
    signals numerical failure since valid domains cannot produce it."""


class SolverError(SlitmapError):
    """Dense linear solve failed or is too ill-conditioned to trust."""

    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


class ResolutionError(SlitmapError):
    """Boundary residual exceeds tolerance; the boundary is under-resolved."""


class PeriodLeakError(SlitmapError):
    """exp(u+iv) failed to return to its start when continued around a hole;
    the flux normalization was not met."""


class SlitWrapError(SlitmapError):
    """A continuous branch of the conjugate phase spans 2*pi or more on a
    slit component; the component is under-resolved."""


class EvaluationError(SlitmapError):
    """Requested evaluation point is outside the domain or too near the
    boundary for the potential representation to be accurate."""


class InversionError(SlitmapError):
    """Newton inversion of the canonical map failed to converge, or the
    target lies outside the image slit annulus."""


class NotEquivalentError(SlitmapError):
    """Moduli of two domains disagree beyond tolerance: no biholomorphism
    compatible with the given markings exists."""


class ComponentMembershipError(SlitmapError):
    """A marked point does not lie on its designated boundary component
    within node resolution."""


class InfiniteGroupError(SlitmapError):
    """Automorphism enumeration was requested for a 2-connected circular
    domain, whose group is a continuum."""


class ToleranceError(SlitmapError):
    """Group closure failed at the working tolerance; tighten it or refine."""


class InternalInconsistencyError(SlitmapError):
    """A closed-form classification produced an element that fails the
    boundary-preservation filter."""


class FamilyRangeError(SlitmapError):
    """Family parameter outside the declared range."""
