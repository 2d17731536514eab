"""Closed-form photon kernels: transverse angular integrals, the
distributional radial kernels c1-c3, smeared Coulomb potentials, the
Euclidean photon propagator and coupling-function norms.
"""
from dataclasses import dataclass
from math import factorial, pi, sqrt

import numpy as np

from .errors import ConfigurationError
from .profiles import DEFAULT_PROFILE
from .quadrature import gauss_legendre, panel_nodes

SERIES_CUTOFF = 0.5
_N_SERIES = 12
_G_COEF = np.array([(-1) ** n / factorial(2 * n + 1) for n in range(_N_SERIES)])
# second derivative of sum c_n s^{2n} is sum c_{n+1} (2n+2)(2n+1) s^{2n}
_G2_COEF = np.array([_G_COEF[n + 1] * (2 * n + 2) * (2 * n + 1) for n in range(_N_SERIES - 1)])


def g_hat(s):
    """sin(s) / s."""
    s = np.asarray(s, dtype=float)
    return np.sinc(s / pi)


def g_hat_dd(s):
    """Second derivative of sin(s)/s, series-evaluated near zero."""
    s = np.asarray(s, dtype=float)
    small = np.abs(s) < SERIES_CUTOFF
    safe = np.where(small, 1.0, s)
    direct = 2 * np.sin(safe) / safe**3 - 2 * np.cos(safe) / safe**2 - np.sin(safe) / safe
    series = np.polynomial.polynomial.polyval(s * s, _G2_COEF)
    return np.where(small, series, direct)


def g_profiles(s):
    """Diagonal entries (b1, b3) of the angular matrix B(s)."""
    g, g2 = g_hat(s), g_hat_dd(s)
    return g - g2, 2.0 * (g + g2)


def orthonormal_frame(a, helper=None):
    """Rows form an orthogonal O with O a = |a| e3.

    ``helper`` picks the completion; any vector not parallel to ``a`` works.
    """
    a = np.asarray(a, dtype=float)
    norm = np.linalg.norm(a)
    if norm == 0:
        raise ConfigurationError("direction of the zero vector is undefined; "
                                 "use the s -> 0 limit (8 pi / 3) * identity")
    e3 = a / norm
    if helper is None:
        helper = np.eye(3)[np.argmin(np.abs(e3))]
    e1 = np.asarray(helper, dtype=float) - np.dot(helper, e3) * e3
    n1 = np.linalg.norm(e1)
    if n1 < 1e-12:
        raise ConfigurationError("frame helper vector is parallel to a")
    e1 /= n1
    e2 = np.cross(e3, e1)
    return np.array([e1, e2, e3])


def angular_transverse_integral(k_mag, a, helper=None):
    """int dOmega exp(i k.a) Q(k) over directions of k with |k| = k_mag."""
    O = orthonormal_frame(a, helper)
    b1, b3 = g_profiles(k_mag * np.linalg.norm(a))
    return 2 * pi * (O.T @ np.diag([b1, b1, b3]) @ O)


def transverse_split(b_perp, b_par, x):
    """Matrix b_perp (1 - x^ x^T) + b_par x^ x^T for a single 3-vector x."""
    x = np.asarray(x, dtype=float)
    n = np.linalg.norm(x)
    if n == 0:
        return b_perp * np.eye(3)
    xh = x / n
    outer = np.outer(xh, xh)
    return b_perp * (np.eye(3) - outer) + b_par * outer


# --- distributional radial kernels ------------------------------------------------

@dataclass(frozen=True)
class DeltaTerm:
    """weight * delta^(order)(v - location)."""

    location: float
    weight: float
    order: int


def sgn(t):
    """Sign with sgn(0) = +1."""
    return np.where(np.asarray(t) >= 0, 1.0, -1.0)


def radial_kernels(v, a, u):
    """Regular parts of c1, c2, c3 at ``v`` and their delta descriptors.

    Returns ``(c1, c2, c3, deltas)`` where ``deltas`` maps 1 and 3 to the
    singular terms of c1 and c3 (c2 has none).
    """
    if not a > 0:
        raise ConfigurationError(f"kernel radius a must be positive, got {a}")
    v = np.asarray(v, dtype=float)
    au = abs(u)
    root = sqrt(2 * pi)
    ep = np.exp(-au * np.abs(v + a))
    em = np.exp(-au * np.abs(v - a))
    c1 = root / (4 * a) * u * u * (-sgn(v + a) * ep + sgn(v - a) * em)
    c2 = root / (4 * a**3) * (sgn(v + a) * ep - sgn(v - a) * em)
    c3 = root / (4 * a**2) * (-au * ep - au * em)
    deltas = {
        1: (DeltaTerm(-a, -2 * root / (4 * a), 1), DeltaTerm(a, 2 * root / (4 * a), 1)),
        2: (),
        3: (DeltaTerm(-a, 2 * root / (4 * a**2), 0), DeltaTerm(a, 2 * root / (4 * a**2), 0)),
    }
    return c1, c2, c3, deltas


def kernel_symbol(which, w, a, u):
    """Fourier-side function whose transform is c_which."""
    w = np.asarray(w, dtype=float)
    if which == 1:
        return w**3 / (w * w + u * u) * np.sin(a * w) / a
    if which == 2:
        return w / (w * w + u * u) * np.sin(a * w) / a**3
    if which == 3:
        return w * w / (w * w + u * u) * np.cos(a * w) / a**2
    raise ValueError(which)


def contract_kernel(which, profile, a, u, scale=1.0, nodes=32):
    """int dv rho_s(v) c_which(v; a, u), rho_s(v) = rho(v / s) / s.

    Delta terms are contracted analytically against rho_s and rho_s'; the
    regular part is integrated piecewise between the kinks at 0, +-a and
    the support edges.
    """
    c_index = {1: 0, 2: 1, 3: 2}[which]
    edge = 2 * profile.support_radius * scale
    if not np.isfinite(edge):
        edge = 40.0 * profile.scale * scale
    cuts = sorted({-edge, edge, 0.0} | {p for p in (-a, a) if -edge < p < edge})
    x, w = panel_nodes(_refine(cuts, 8), nodes)

    def rho_s(v):
        return profile.rho(np.asarray(v) / scale) / scale

    def rho_s_prime(v):
        return profile.rho_prime(np.asarray(v) / scale) / scale**2

    regular = np.dot(w, rho_s(x) * radial_kernels(x, a, u)[c_index])
    singular = 0.0
    for d in radial_kernels(0.0, a, u)[3][which]:
        if d.order == 0:
            singular += d.weight * rho_s(d.location)
        else:
            singular -= d.weight * rho_s_prime(d.location)
    return float(regular + singular)


def _refine(cuts, pieces):
    out = []
    for lo, hi in zip(cuts, cuts[1:]):
        out.extend(np.linspace(lo, hi, pieces + 1)[:-1])
    out.append(cuts[-1])
    return out


# --- smeared Coulomb potential --------------------------------------------------

def smeared_coulomb(profile, alpha, x_mag):
    """V_alpha(x) = 4 pi int dk |phi_hat(alpha k)|^2 |k|^-2 exp(-i k.x).

    Evaluated in position space as the potential of the radial charge
    phi_alpha * phi_alpha; outside its support (|x| >= 2 alpha R_phi) this is
    1/|x| by the shell theorem.
    """
    x = np.asarray(x_mag, dtype=float)
    if np.any(x <= 0):
        raise ConfigurationError("smeared Coulomb potential needs |x| > 0")
    if alpha == 0:
        return 1.0 / x
    inside = x < 2 * alpha * profile.support_radius
    out = 1.0 / x
    if np.any(inside):
        xs = x[inside] if x.ndim else x
        s = xs / alpha
        # V = M(x)/x + 4 pi int_x^inf r sigma_alpha(r) dr
        outer = 4 * pi * (2 * pi) ** 1.5 * profile.rho(s) / alpha
        val = profile.enclosed_charge(s) / xs + outer
        if x.ndim:
            out = out.copy()
            out[inside] = val
        else:
            out = val
    return out


def smeared_coulomb_fourier(profile, alpha, x_mag, nodes=24):
    """Momentum-space route: 16 pi^2 int_0^inf rho_hat(alpha k) sin(k x)/(k x) dk."""
    kmax = profile.k_cutoff(1e-18) / max(alpha, 1e-300)
    period = pi / x_mag
    n_panels = int(np.ceil(kmax / min(period, 0.5 / max(alpha, 1e-3))))
    k, w = panel_nodes(np.linspace(0.0, kmax, n_panels + 1), nodes)
    return 16 * pi**2 * np.dot(w, profile.rho_hat(alpha * k) * np.sinc(k * x_mag / pi))


def pair_potential(profile, alpha, r, x1, x2):
    """Interaction potential -V(x1 - r) - V(x2 + r) + V(r) + V(r + x2 - x1)."""
    r, x1, x2 = (np.asarray(v, dtype=float) for v in (r, x1, x2))

    def V(y):
        return smeared_coulomb(profile, alpha, float(np.linalg.norm(y)))

    return -V(x1 - r) - V(x2 + r) + V(r) + V(r + x2 - x1)


def coulomb_pair_potential(r, x1, x2):
    """Point-charge limit of :func:`pair_potential`."""
    r, x1, x2 = (np.asarray(v, dtype=float) for v in (r, x1, x2))
    n = np.linalg.norm
    return -1 / n(x1 - r) - 1 / n(x2 + r) + 1 / n(r) + 1 / n(r + x2 - x1)


# --- photon propagator ------------------------------------------------------------

def radial_grid(profile, x_max=0.0, nodes=16, rel=1e-18):
    """Composite Gauss-Legendre nodes on [0, k_cutoff] resolving oscillations
    of sin(k |x|) for |x| <= x_max."""
    kmax = profile.k_cutoff(rel)
    width = min(0.5 / profile.scale, 2.0 / max(x_max, 1e-300))
    n_panels = max(8, int(np.ceil(kmax / width)))
    return panel_nodes(np.linspace(0.0, kmax, n_panels + 1), nodes)


def propagator_components(profile, x_mag, t, grid=None):
    """Transverse and longitudinal scalars of W_1 on the outer grid x_mag x t.

    W_1(x, t) = W_perp (1 - x^ x^T) + W_par x^ x^T with
    W_perp = pi int dr r rho_hat(r) e^{-rt} b1(r|x|) and likewise b3 for W_par.
    """
    x_mag = np.atleast_1d(np.asarray(x_mag, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if grid is None:
        grid = radial_grid(profile, float(np.max(x_mag)))
    r, w = grid
    base = pi * w * r * profile.rho_hat(r)
    decay = np.exp(-np.outer(r, t)) * base[:, None]
    perp = np.empty((len(x_mag), len(t)))
    par = np.empty_like(perp)
    for lo in range(0, len(x_mag), 256):
        sl = slice(lo, lo + 256)
        b1, b3 = g_profiles(np.outer(x_mag[sl], r))
        perp[sl] = b1 @ decay
        par[sl] = b3 @ decay
    return perp, par


def photon_propagator(profile, x, t):
    """W_1(x, t) = int dk rho_hat(k) (2|k|)^-1 e^{ik.x} e^{-|k| t} Q(k) as a 3x3 matrix."""
    if t < 0:
        raise ConfigurationError(f"propagator time must be nonnegative, got {t}")
    x = np.asarray(x, dtype=float)
    perp, par = propagator_components(profile, np.linalg.norm(x), t)
    return transverse_split(perp[0, 0], par[0, 0], x)


# --- coupling norms ------------------------------------------------------------------

@dataclass(frozen=True)
class CouplingNorms:
    alpha: float
    delta: float
    norm_g: float
    norm_g_over_sqrt_omega: float

    @property
    def annihilation_bound(self):
        """alpha^{3/2} ||omega^{-1/2} g||, expected ~ alpha^{(1+delta)/2}."""
        return self.alpha**1.5 * self.norm_g_over_sqrt_omega

    @property
    def quadratic_bound(self):
        """alpha^3 ||g|| ||omega^{-1/2} g||, expected ~ alpha^{3 delta/2}."""
        return self.alpha**3 * self.norm_g * self.norm_g_over_sqrt_omega

    @property
    def coupling_norm(self):
        """||sqrt(4 pi) alpha^{3/2} g||, which diverges as alpha^{-1/2} at delta = 0."""
        return sqrt(4 * pi) * self.alpha**1.5 * self.norm_g


def coupling_norms(profile=DEFAULT_PROFILE, alpha=0.1, delta=0.0, nodes=24):
    """Norms of g(k, lam) = phi_hat(alpha^{2-delta} k) (2 omega)^{-1/2} e^{i alpha k.x} eps(k, lam).

    Summing both polarizations,
    ||g||^2 = 4 pi int_0^inf k rho_hat(beta k) dk and
    ||omega^{-1/2} g||^2 = 4 pi int_0^inf rho_hat(beta k) dk, beta = alpha^{2-delta}.
    """
    if not 0 < alpha < 1:
        raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0 <= delta < 1:
        raise ConfigurationError(f"delta must lie in [0, 1), got {delta}")
    beta = alpha ** (2 - delta)
    kmax = profile.k_cutoff(1e-20) / beta
    k, w = panel_nodes(np.linspace(0.0, kmax, 400), nodes)
    rh = profile.rho_hat(beta * k)
    g2 = 4 * pi * np.dot(w, k * rh)
    go2 = 4 * pi * np.dot(w, rh)
    return CouplingNorms(alpha, delta, sqrt(g2), sqrt(go2))


def loglog_slope(x, y):
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
