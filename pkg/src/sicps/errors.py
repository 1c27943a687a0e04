"""Exception types raised across the package."""


class SicpsError(Exception):
    """Base class for all package errors."""


class DimensionError(SicpsError, ValueError):
    """Invalid Hilbert-space dimension or mismatched shapes."""


class NotFiducial(SicpsError):
    pass


class InconsistentPhases(SicpsError, ValueError):
    pass


class NonConvergent(SicpsError, ValueError):
    pass


class ResolutionTooLow(SicpsError, ValueError):
    pass


class ZeroCountMismatch(SicpsError):
    pass


class SingularSampling(SicpsError):
    pass


class LabelAmbiguous(SicpsError):
    pass


class ZeroProjection(SicpsError):
    pass


class NotAnOrbit(SicpsError, ValueError):
    pass


class ParseError(SicpsError, ValueError):
    pass


class NotNormalizable(SicpsError, ValueError):
    pass


class UnsupportedFormat(SicpsError, ValueError):
    pass


class InvalidConstellation(SicpsError, ValueError):
    """Zeros that violate the centroid constraint."""
