"""Exception types raised by the estimation toolkit."""


class AttboundError(Exception):
    """Base class for all toolkit errors."""


class NotSkew(AttboundError):
    """Matrix expected to be skew-symmetric is not."""


class NotSPD(AttboundError):
    """Matrix expected to be symmetric positive definite is not."""


class DegenerateProfile(AttboundError):
    """Attitude profile matrix is singular; the attitude is unobservable."""


class NoConvergence(AttboundError):
    """Implicit integrator step failed to converge."""


class DegenerateEllipsoid(AttboundError):
    """Operation requires a non-degenerate (full-rank) ellipsoid."""


class ZeroTrace(AttboundError):
    """Ellipsoid with non-positive trace where a positive size is required."""


class EmptyIntersection(AttboundError):
    """Predicted and measured sets do not intersect; a bound was violated."""


class ChartOverflow(AttboundError):
    """Attitude difference reached the exponential-chart boundary (180 deg)."""


class ScenarioError(AttboundError):
    """Simulation scenario failed validation."""
