"""Phase-space tools for odd-dimensional quantum systems and SIC-POVM fiducials."""

__version__ = "0.1.0"

from .weyl import PureState, displacement, reflection  # noqa: E402,F401
