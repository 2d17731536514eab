"""Numerical toolkit for the hydrogen-hydrogen interaction from the
van der Waals R^-6 law to the retarded Casimir-Polder R^-7 law."""

__version__ = "0.1.0"

from .errors import (AccuracyError, ConfigurationError, ConsistencyError, CrossoverError,
                     NumericError, TableRangeError)
from .spectral import BasisConfig, DipoleSpectrum, build_dipole_spectrum
from .profiles import SmearingProfile, DEFAULT_PROFILE, SHIPPED_PROFILES
from .quadrature import QuadratureSettings

__all__ = [
    "AccuracyError", "ConfigurationError", "ConsistencyError", "CrossoverError",
    "NumericError", "TableRangeError", "BasisConfig", "DipoleSpectrum",
    "build_dipole_spectrum", "SmearingProfile", "DEFAULT_PROFILE", "SHIPPED_PROFILES",
    "QuadratureSettings",
]
