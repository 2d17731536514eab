
import pytest

from vdw_crossover.spectral import BasisConfig, build_dipole_spectrum



@pytest.fixture(scope="session")
def spectrum():
    return build_dipole_spectrum(BasisConfig(80, 1.0))
