"""Crossover function between the R^-6 and R^-7 laws, its limiting
coefficients, and the leading-order energies for every distance scale
alpha^-gamma R.
"""
from dataclasses import dataclass, field
from math import pi

import numpy as np

from .errors import AccuracyError, ConfigurationError, ConsistencyError
from .quadrature import QuadratureSettings, integrate_semi_infinite
from .spectral import dipole_correlation, reduced_polarizability, static_polarizability

CP_PREFACTOR = 23.0 / (4.0 * pi)

SIGN_NOTE = ("1<gamma<2 branch uses the attractive sign -alpha^(6 gamma-4) a_VW R^-6, "
             "matching h_co(R) -> a_VW R^-6 at small R")


def crossover_weight(R, u):
    """Polynomial factor multiplying exp(-R u) in the crossover integrand."""
    return (u**4 / (8 * R**2) + u**3 / (2 * R**3) + 2.5 * u**2 / R**4
            + 6 * u / R**5 + 6 / R**6)


def vdw_closed_form(spec):
    """6 sum_{n,m} s_n s_m / (E_n + E_m)."""
    e, s = spec.excitations, spec.strengths
    return 6.0 * float(s @ (1.0 / (e[:, None] + e[None, :])) @ s)


def vdw_time_domain(spec, q=QuadratureSettings()):
    """6 int_0^inf C(t)^2 dt by quadrature."""
    return 6.0 * integrate_semi_infinite(lambda t: dipole_correlation(spec, t) ** 2, q).value


def vdw_frequency_domain(spec, q=QuadratureSettings()):
    """(3/pi) int_0^inf alpha(i w)^2 dw, the textbook Casimir-Polder form."""
    def integrand(w):
        return (2.0 * reduced_polarizability(spec, 2.0 * w)) ** 2
    return 3.0 / pi * integrate_semi_infinite(integrand, q).value


def vdw_coefficient(spec, q=QuadratureSettings(), tol=1e-8, details=False):
    """a_VW, cross-checked between the closed form and time-domain quadrature."""
    closed = vdw_closed_form(spec)
    timed = vdw_time_domain(spec, q)
    if abs(closed - timed) > tol * abs(closed):
        raise ConsistencyError(
            f"a_VW closed form {closed!r} and time-domain quadrature {timed!r} disagree",
            values=(closed, timed))
    if details:
        return closed, timed
    return closed


def cp_coefficient(spec=None, polarizability=None):
    """a_CP = (23 / 4 pi) alpha_hy^2."""
    if polarizability is None:
        polarizability = static_polarizability(spec)
    return CP_PREFACTOR * polarizability**2


def crossover_integral(f_of_u, R, q=QuadratureSettings()):
    """pi^-1 int_0^inf f(u)^2 exp(-R u) P(R, u) du for an arbitrary spectral function."""
    if not R > 0:
        raise ConfigurationError(f"crossover distance must be positive, got {R}")

    def integrand(u):
        return f_of_u(u) ** 2 * np.exp(-R * u) * crossover_weight(R, u)

    # rescaling u by 1/R keeps the integrand on an O(1) window for any R
    r = integrate_semi_infinite(lambda s: integrand(s / R) / R, q)
    value = r.value / pi
    err = r.error / pi
    if err > max(q.abs_tol, q.rel_tol * abs(value)) * 10:
        raise AccuracyError(f"h_co({R}) quadrature error {err:.3g} above tolerance",
                            estimate=value, error=err)
    return value, err


def crossover_function(spec, R, q=QuadratureSettings(), with_error=False):
    """h_co(R) built on the reduced polarizability of ``spec``."""
    value, err = crossover_integral(lambda u: reduced_polarizability(spec, u), R, q)
    return (value, err) if with_error else value


@dataclass
class CrossoverCurve:
    R: np.ndarray
    h: np.ndarray
    a_vw: float
    a_cp: float

    @property
    def h_r6(self):
        return self.h * self.R**6

    @property
    def h_r7(self):
        return self.h * self.R**7

    @property
    def crossover_scale(self):
        """R* = a_CP / a_VW, where the two asymptotic laws meet."""
        return self.a_cp / self.a_vw

    def rows(self):
        return list(zip(self.R, self.h, self.h_r6, self.h_r7))


def crossover_scan(spec, R_values, q=QuadratureSettings()):
    R = np.asarray(list(R_values), dtype=float)
    if np.any(R <= 0):
        raise ConfigurationError("crossover scan needs positive distances")
    if np.any(np.diff(R) <= 0):
        raise ConfigurationError("crossover scan distances must be strictly increasing")
    h = np.array([crossover_function(spec, r, q) for r in R])
    return CrossoverCurve(R, h, vdw_closed_form(spec), cp_coefficient(spec))


@dataclass
class RegimeConstants:
    """External data the short-distance branches need.

    ``E_he`` (helium ground-state energy) and the ``E_2R`` table are not
    computed here and have no default.
    """

    E_he: float = None
    E_2R_table: dict = field(default_factory=dict)
    a0: float = None

    def __post_init__(self):
        if self.E_he is not None and not self.E_he < 0:
            raise ConfigurationError(f"E_he must be negative, got {self.E_he}")
        self.E_2R_table = {float(k): float(v) for k, v in (self.E_2R_table or {}).items()}

    def e2r(self, R):
        if not self.E_2R_table:
            raise ConfigurationError("gamma = 1 needs an E_2R table (two-atom ground-state energies)")
        keys = np.array(sorted(self.E_2R_table))
        if R in self.E_2R_table:
            return self.E_2R_table[R]
        if not keys[0] <= R <= keys[-1]:
            raise ConfigurationError(f"R = {R} outside the E_2R table range [{keys[0]}, {keys[-1]}]")
        return float(np.interp(R, keys, [self.E_2R_table[k] for k in keys]))


def regime_branch(gamma):
    if gamma < 0:
        raise ConfigurationError(f"gamma must be nonnegative, got {gamma}")
    if gamma == 0:
        return "gamma=0"
    if gamma < 1:
        return "0<gamma<1"
    if gamma == 1:
        return "gamma=1"
    if gamma < 2:
        return "1<gamma<2"
    if gamma == 2:
        return "gamma=2"
    return "gamma>2"


def regime_energy(alpha, gamma, R, spec, consts=RegimeConstants(), q=QuadratureSettings(),
                  profile=None):
    """Leading-order energy at separation alpha^-gamma R.

    For gamma > 1 the returned value excludes the self-energy offset
    2 E_{1,alpha}.  The gamma = 0 branch evaluates the smeared potential of
    ``profile`` (point Coulomb if none is given).
    """
    if not 0 < alpha < 1:
        raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
    if not R > 0:
        raise ConfigurationError(f"R must be positive, got {R}")
    branch = regime_branch(gamma)

    if branch in ("gamma=0", "0<gamma<1", "gamma=1"):
        if consts.a0 is None:
            raise ConfigurationError(f"branch {branch} needs the self-energy constant a0")
    if branch in ("gamma=0", "0<gamma<1"):
        if consts.E_he is None:
            raise ConfigurationError(f"branch {branch} needs the helium energy E_he")
        core = alpha**2 * (consts.E_he - 2 * consts.a0)
        if branch == "gamma=0":
            if profile is None:
                potential = 1.0 / R
            else:
                from .kernels import smeared_coulomb
                potential = smeared_coulomb(profile, alpha, R)
            return alpha * potential + core
        return alpha ** (1 + gamma) / R + core
    if branch == "gamma=1":
        return alpha**2 * (consts.e2r(R) - 2 * consts.a0)
    if branch == "1<gamma<2":
        return -alpha ** (6 * gamma - 4) * vdw_closed_form(spec) / R**6
    if branch == "gamma=2":
        return -alpha**8 * crossover_function(spec, R, q)
    return -alpha ** (7 * gamma - 6) * cp_coefficient(spec) / R**7
