r"""Radial charge distributions and their transforms.

One Fourier convention is used throughout the package:

.. math::

    \hat\varphi(k) = (2\pi)^{-3/2} \int \varphi(x) e^{-ik\cdot x}\,dx,
    \qquad \hat\varrho(|k|) = |\hat\varphi(k)|^2,

    \rho(v) = (2\pi)^{-1/2}\int_{\mathbb R} \hat\varrho(w) e^{ivw}\,dw
            = (2\pi)^{-3/2}\int_{|v|}^\infty r\,\sigma(r)\,dr,

with :math:`\sigma` the radial profile of :math:`\varphi * \varphi`.  Hence
:math:`\hat\varphi(0) = (2\pi)^{-3/2}` and
:math:`\int\rho = (2\pi)^{-5/2}`.
"""
import configparser
import warnings
from dataclasses import dataclass
from math import gamma as gamma_fn
from math import pi, sqrt

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import erf

from .errors import ConfigurationError

TWO_PI = 2.0 * pi

# unit-radius bump phi(r) = 315/(64 pi) (1 - r^2)^3
_BUMP_NORM = 315.0 / (64.0 * pi)

# sigma(d) on [0, 2] for the unit bump, times pi; ascending powers of d
_BUMP_SIGMA_PI = np.array([
    315 / 143, 0, -2835 / 572, 0, 945 / 176, 0, -315 / 64, 2835 / 1024, 0,
    -315 / 1024, 0, 2835 / 90112, 0, -4725 / 2342912, 0, 2205 / 37486592,
])

_SERIES_TERMS = 24


def _bump_series_coeffs():
    # phi_hat(k) (2 pi)^{3/2} = sum_n (-1)^n a_n k^{2n}
    # a_n = 4 pi c int_0^1 r^{2n+2} (1-r^2)^3 dr / (2n+1)!
    out = []
    for n in range(_SERIES_TERMS):
        beta = 0.5 * gamma_fn(n + 1.5) * gamma_fn(4) / gamma_fn(n + 5.5)
        out.append((-1) ** n * 4 * pi * _BUMP_NORM * beta / gamma_fn(2 * n + 2))
    return np.array(out)


_BUMP_SERIES = _bump_series_coeffs()


@dataclass(frozen=True)
class SmearingProfile:
    """A normalized radial charge distribution.

    ``family`` is ``"bump"`` (``(1 - r^2/R^2)^3`` on ``r <= R``, ``scale = R``)
    or ``"gaussian"`` (standard deviation ``scale`` per axis).
    """

    name: str = "bump"
    family: str = "bump"
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in ("bump", "gaussian"):
            raise ConfigurationError(f"unknown profile family {self.family!r}")
        if not self.scale > 0:
            raise ConfigurationError(f"profile scale must be positive, got {self.scale}")
        if self.family == "bump":
            R = self.scale
            sig = _BUMP_SIGMA_PI / pi / R**3 * R ** -np.arange(len(_BUMP_SIGMA_PI), dtype=float)
            # rho(v) = (2 pi)^{-3/2} int_v^{2R} r sigma(r) dr
            antideriv = P.polyint(P.polymulx(sig))
            rho_poly = -antideriv
            rho_poly[0] += P.polyval(2 * R, antideriv)
            rho_poly *= TWO_PI**-1.5
            # enclosed charge M(x) = 4 pi int_0^x r^2 sigma(r) dr
            mass_poly = 4 * pi * P.polyint(P.polymulx(P.polymulx(sig)))
            object.__setattr__(self, "_sigma_poly", sig)
            object.__setattr__(self, "_rho_poly", rho_poly)
            object.__setattr__(self, "_mass_poly", mass_poly)

    @property
    def compact(self):
        return self.family == "bump"

    @property
    def support_radius(self):
        """Radius R_phi of supp(phi); inf for the Gaussian."""
        return self.scale if self.compact else np.inf

    def require_compact(self, what):
        if not self.compact:
            warnings.warn(f"{what}: profile {self.name!r} has no compact support; "
                          "the small-alpha limits assume it does", stacklevel=3)

    def with_scale(self, scale, name=None):
        return SmearingProfile(name or f"{self.name}@{scale:g}", self.family, scale)

    def phi(self, r):
        r = np.abs(np.asarray(r, dtype=float))
        if self.family == "gaussian":
            w = self.scale
            return (TWO_PI * w * w) ** -1.5 * np.exp(-0.5 * (r / w) ** 2)
        R = self.scale
        x = np.minimum(r / R, 1.0)
        return np.where(r < R, _BUMP_NORM / R**3 * (1 - x * x) ** 3, 0.0)

    def phi_hat(self, k):
        """Three-dimensional transform of phi; real and radial."""
        k = np.abs(np.asarray(k, dtype=float))
        if self.family == "gaussian":
            return TWO_PI**-1.5 * np.exp(-0.5 * (k * self.scale) ** 2)
        s = k * self.scale
        small = s < 2.0
        out = np.empty_like(s)
        ss = s[small]
        out[small] = P.polyval(ss * ss, _BUMP_SERIES)
        sl = s[~small]
        sn, cs = np.sin(sl), np.cos(sl)
        out[~small] = 945.0 * (sl**4 * sn + 10 * sl**3 * cs - 45 * sl**2 * sn
                               - 105 * sl * cs + 105 * sn) / sl**9
        return TWO_PI**-1.5 * out

    def rho_hat(self, k):
        """|phi_hat|^2 as an even function of a real argument."""
        return self.phi_hat(k) ** 2

    def sigma(self, r):
        """Radial profile of phi * phi."""
        r = np.abs(np.asarray(r, dtype=float))
        if self.family == "gaussian":
            w = self.scale
            return (4 * pi * w * w) ** -1.5 * np.exp(-r * r / (4 * w * w))
        return np.where(r < 2 * self.scale, P.polyval(r, self._sigma_poly), 0.0)

    def rho(self, v):
        v = np.abs(np.asarray(v, dtype=float))
        if self.family == "gaussian":
            w = self.scale
            return TWO_PI**-1.5 * np.exp(-v * v / (4 * w * w)) / (4 * pi**1.5 * w)
        return np.where(v < 2 * self.scale, P.polyval(v, self._rho_poly), 0.0)

    def rho_prime(self, v):
        """d rho / dv = -(2 pi)^{-3/2} v sigma(|v|)."""
        v = np.asarray(v, dtype=float)
        return -(TWO_PI**-1.5) * v * self.sigma(v)

    def enclosed_charge(self, r):
        """Fraction of phi * phi inside radius r."""
        r = np.abs(np.asarray(r, dtype=float))
        if self.family == "gaussian":
            a = r / (2 * self.scale)
            return erf(a) - 2 * a / sqrt(pi) * np.exp(-a * a)
        return np.where(r < 2 * self.scale, P.polyval(r, self._mass_poly), 1.0)

    def k_cutoff(self, rel=1e-16):
        """Wavenumber beyond which rho_hat is negligible relative to rho_hat(0)."""
        if self.family == "gaussian":
            return sqrt(-np.log(rel)) / self.scale
        # rho_hat ~ 945^2 s^-10 (2 pi)^-3 for s = k R >> 1
        return (945.0**2 / rel) ** 0.1 / self.scale


DEFAULT_PROFILE = SmearingProfile()

SHIPPED_PROFILES = {
    "bump": DEFAULT_PROFILE,
    "bump-wide": SmearingProfile("bump-wide", "bump", 2.0),
    "gaussian": SmearingProfile("gaussian", "gaussian", 0.5),
}


def load_profiles(path_or_text):
    """Read profile definitions from an INI file.

    Each ``[profile:NAME]`` section holds ``family`` (bump | gaussian) and
    ``scale`` (R_phi or the Gaussian width).
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if "\n" in str(path_or_text) or "[" in str(path_or_text):
        parser.read_string(str(path_or_text))
    else:
        if not parser.read(path_or_text):
            raise ConfigurationError(f"cannot read profile file {path_or_text}")
    out = {}
    for section in parser.sections():
        if not section.startswith("profile:"):
            continue
        name = section.split(":", 1)[1].strip()
        body = parser[section]
        try:
            out[name] = SmearingProfile(name, body.get("family", "bump"),
                                        body.getfloat("scale", 1.0))
        except ValueError as exc:
            raise ConfigurationError(f"profile {name!r}: {exc}") from exc
    return out
