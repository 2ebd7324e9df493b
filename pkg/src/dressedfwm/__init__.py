"""Dressed four-wave mixing in a double-Lambda vapour: gain, noise and sideband correlations."""

from .model import DriveParameters, LevelScheme, build_liouville_system, rb_double_lambda
from .propagation import build_medium, gain_spectrum, propagate_carrier
from .noise import output_covariance

__version__ = "0.1.0"

__all__ = [
    "DriveParameters",
    "LevelScheme",
    "build_liouville_system",
    "build_medium",
    "gain_spectrum",
    "output_covariance",
    "propagate_carrier",
    "rb_double_lambda",
]
