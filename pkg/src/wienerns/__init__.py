"""Pseudo-spectral vector calculus and identity checks for stationary incompressible flow."""
from .field import (Field, GridSpec, SpectralField, check_reality, forward_transform,
                    inverse_transform, spectrum_support)
from .nse import NseState
from .report import CheckReport

__version__ = "0.1.0"

__all__ = ["Field", "GridSpec", "SpectralField", "NseState", "CheckReport", "check_reality",
           "forward_transform", "inverse_transform", "spectrum_support", "__version__"]
