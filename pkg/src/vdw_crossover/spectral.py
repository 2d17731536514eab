r"""Dipole spectrum of hydrogen from an l = 1 Coulomb-Sturmian basis.

The p-wave radial functions are

.. math::

    u_i(r) = h_i^{-1/2}\, x^2 e^{-x/2} L_i^{(3)}(x), \qquad x = 2\lambda r,
    \qquad h_i = \Gamma(i+4)/i!,

for which :math:`\langle u_i|r^{-1}|u_j\rangle = \delta_{ij}`, the overlap is
tridiagonal, and the Sturmian equation

.. math::

    \big(-\tfrac12 \partial_r^2 + r^{-2} + \tfrac12\lambda^2\big) u_i
    = (i+2)\lambda\, r^{-1} u_i

gives the Hamiltonian without any numerical integration.  The ground state
is the exact :math:`\psi_0 = \pi^{-1/2} e^{-r}`.

All quantities are in atomic units with energies measured from
:math:`E_{hy} = -1/2`.
"""
from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .errors import ConfigurationError

GROUND_ENERGY = -0.5
FIRST_GAP = 0.375


@dataclass(frozen=True)
class BasisConfig:
    size: int = 80
    length_scale: float = 1.0

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ConfigurationError(f"basis size must be a positive integer, got {self.size}")
        if not self.length_scale > 0:
            raise ConfigurationError(f"basis length scale must be positive, got {self.length_scale}")


@dataclass(frozen=True)
class DipoleSpectrum:
    """Excitation energies ``E_n`` and per-component dipole strengths ``s_n``.

    ``s_n = |<psi_0| z |phi_n>|^2``, so that ``sum(s_n) = <r^2>/3 = 1`` for a
    complete basis.
    """

    excitations: np.ndarray
    strengths: np.ndarray
    config: BasisConfig = None

    def __post_init__(self):
        e = np.array(self.excitations, dtype=float)
        s = np.array(self.strengths, dtype=float)
        if e.shape != s.shape or e.ndim != 1:
            raise ConfigurationError("excitations and strengths must be 1-D arrays of equal length")
        if np.any(e <= 0) or np.any(s < 0):
            raise ConfigurationError("spectrum needs positive excitations and nonnegative strengths")
        order = np.argsort(e, kind="stable")
        e, s = e[order], s[order]
        e.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "excitations", e)
        object.__setattr__(self, "strengths", s)

    def __len__(self):
        return len(self.excitations)

    def scaled(self, factor):
        """Same strengths, excitations multiplied by ``factor``."""
        return DipoleSpectrum(self.excitations * factor, self.strengths, self.config)


def sturmian_matrices(config):
    """Overlap ``S``, Hamiltonian ``H`` and the ground-state projection vector."""
    n, lam = int(config.size), float(config.length_scale)
    i = np.arange(n, dtype=float)
    a = 3.0

    S = np.diag((2 * i + a + 1) / (2 * lam))
    off = -np.sqrt((i[:-1] + 1) * (i[:-1] + a + 1)) / (2 * lam)
    S += np.diag(off, 1) + np.diag(off, -1)
    H = -0.5 * lam**2 * S + np.diag((i + 2) * lam - 1.0)

    # projections <r^2 e^{-r} | u_i> from the Laguerre generating function
    p = 0.5 * (1.0 + 1.0 / lam)
    q = (1.0 - p) / p
    moments = np.empty(n)
    for k in range(n):
        term = comb(k + 4, 4) * (-q) ** k
        if k > 0:
            term -= comb(k + 3, 4) * (-q) ** (k - 1)
        moments[k] = 24.0 * p**-5 * term
    log_h = gammaln(i + 4) - gammaln(i + 1)
    proj = moments * np.exp(-0.5 * log_h) / (8 * lam**3)
    return S, H, proj


def build_dipole_spectrum(config=BasisConfig()):
    """Diagonalize the p-wave Hamiltonian and return the sorted dipole spectrum."""
    S, H, proj = sturmian_matrices(config)
    try:
        energies, vecs = scipy.linalg.eigh(H, S)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConfigurationError(
            f"generalized eigenproblem failed for N={config.size}, lambda={config.length_scale}: {exc}"
        ) from exc
    # <psi_0|z|phi> = (2/sqrt 3) * int r^2 e^{-r} u(r) dr
    amplitudes = (2.0 / np.sqrt(3.0)) * (proj @ vecs)
    return DipoleSpectrum(energies - GROUND_ENERGY, amplitudes**2, config)


def reduced_polarizability(spec, u):
    """``f(u) = sum_n s_n E_n / (E_n^2 + (u/2)^2)``; vectorized in ``u``."""
    u = np.asarray(u, dtype=float)
    e, s = spec.excitations, spec.strengths
    half = 0.5 * u[..., None]
    return np.sum(s * e / (e * e + half * half), axis=-1)


def dynamic_polarizability(spec, omega):
    """alpha(i omega) = 2 sum_n s_n E_n / (E_n^2 + omega^2) = 2 f(2 omega)."""
    return 2.0 * reduced_polarizability(spec, 2.0 * np.asarray(omega, dtype=float))


def static_polarizability(spec, max_excitation=None):
    """``2 sum s_n / E_n``, optionally restricted to ``E_n < max_excitation``."""
    e, s = spec.excitations, spec.strengths
    if max_excitation is not None:
        keep = e < max_excitation
        e, s = e[keep], s[keep]
    return 2.0 * float(np.sum(s / e))


def dipole_correlation(spec, t):
    """``C(t) = sum_n s_n exp(-E_n t)``; vectorized in ``t``."""
    t = np.asarray(t, dtype=float)
    return np.sum(spec.strengths * np.exp(-spec.excitations * t[..., None]), axis=-1)


def oscillator_sum(spec, power=0):
    """``sum_n s_n E_n**power`` (power 0: closure, power 1: half the TRK sum)."""
    return float(np.sum(spec.strengths * spec.excitations**power))


def bound_state_strength(n):
    """Exact ``|<1s|z|np>|^2`` for hydrogen, n >= 2."""
    n = np.asarray(n, dtype=float)
    log_val = (8 * np.log(2.0) + 7 * np.log(n) + (2 * n - 5) * np.log(n - 1)
               - (2 * n + 5) * np.log(n + 1))
    return np.exp(log_val) / 3.0


def bound_state_polarizability(n_max=100000):
    """Discrete-spectrum part of the static polarizability, summed over n = 2..n_max.

    The remaining tail falls off as n^-3 and is added from its asymptotic form.
    """
    n = np.arange(2, n_max + 1, dtype=float)
    terms = 2.0 * bound_state_strength(n) / (0.5 - 0.5 / n**2)
    # s_n ~ c n^-3 with c = 2^8 e^-4 / 3; E_n -> 1/2
    c = 2.0**8 * np.exp(-4.0) / 3.0
    tail = 2.0 * c / 0.5 / (2.0 * (n_max + 0.5) ** 2)
    return float(np.sum(terms) + tail)
