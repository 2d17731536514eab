"""Brute-force reference evaluations for the closed-form kernels.

Each oracle evaluates the defining integral directly (no angular reduction,
no distributional calculus) and is meant only for cross-checks.
"""
from math import pi

import numpy as np

from .kernels import (angular_transverse_integral, contract_kernel, kernel_symbol,
                      photon_propagator)
from .profiles import DEFAULT_PROFILE
from .quadrature import gauss_legendre, panel_nodes


def sphere_rule(n_theta=48, n_phi=96):
    """Unit vectors and weights of a Gauss-Legendre x trapezoid sphere rule."""
    c, wc = gauss_legendre(n_theta)
    phi = 2 * pi * np.arange(n_phi) / n_phi
    st = np.sqrt(1 - c * c)
    dirs = np.stack([np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)),
                     np.outer(c, np.ones(n_phi))], axis=-1).reshape(-1, 3)
    w = np.outer(wc, np.full(n_phi, 2 * pi / n_phi)).ravel()
    return dirs, w


def _projectors(dirs):
    return np.eye(3)[None] - dirs[:, :, None] * dirs[:, None, :]


def angular_integral_oracle(k_mag, a, n_theta=64, n_phi=128):
    """int dOmega exp(i k.a) Q(k) with complex phases kept; returns the real part.

    The rule is aligned with ``a`` so the polar integrand is smooth.
    """
    a = np.asarray(a, dtype=float)
    norm = np.linalg.norm(a)
    dirs, w = sphere_rule(n_theta, n_phi)
    if norm > 0:
        # rotate the polar axis onto a
        from .kernels import orthonormal_frame
        dirs = dirs @ orthonormal_frame(a)
    phase = np.exp(1j * k_mag * dirs @ a)
    mat = np.einsum("n,nij->ij", w * phase, _projectors(dirs))
    return mat.real, float(np.max(np.abs(mat.imag)))


def plancherel_oracle(which, profile, a, u, scale=1.0, nodes=24):
    """int_R F_which(w) rho_hat(scale * w) dw, the Fourier-side contraction."""
    kmax = profile.k_cutoff(1e-18) / scale
    period = 2 * pi / max(a, 1e-300)
    n_panels = int(np.ceil(kmax / min(period / 4, 0.5 / scale)))
    w, wt = panel_nodes(np.linspace(0.0, kmax, n_panels + 1), nodes)
    return 2.0 * float(np.dot(wt, kernel_symbol(which, w, a, u) * profile.rho_hat(scale * w)))


def propagator_oracle(profile, x, t, radial_nodes=16, n_theta=48, n_phi=96):
    """int d^3k rho_hat(k) (2|k|)^-1 exp(i k.x) exp(-|k| t) Q(k), direct in 3D."""
    x = np.asarray(x, dtype=float)
    kmax = profile.k_cutoff(1e-14)
    xm = max(np.linalg.norm(x), 1e-300)
    n_panels = max(16, int(np.ceil(kmax / min(0.5 / profile.scale, 1.0 / xm))))
    k, wk = panel_nodes(np.linspace(0.0, kmax, n_panels + 1), radial_nodes)
    dirs, wd = sphere_rule(n_theta, n_phi)
    Q = _projectors(dirs)
    radial = wk * k * k * profile.rho_hat(k) / (2 * np.maximum(k, 1e-300)) * np.exp(-k * t)
    phase = np.exp(1j * np.outer(k, dirs @ x))  # (nk, ndirs)
    angular = (phase * wd[None, :]).real @ Q.reshape(len(dirs), 9)
    return (radial @ angular).reshape(3, 3)


def angular_case(rng):
    k = rng.uniform(0.0, 6.0)
    a = rng.normal(size=3) * rng.uniform(0.05, 2.0)
    closed = angular_transverse_integral(k, a)
    ref, imag = angular_integral_oracle(k, a)
    return float(np.max(np.abs(closed - ref))), max(imag, 0.0)


def kernel_case(which, profile, a, u, scale):
    closed = contract_kernel(which, profile, a, u, scale)
    ref = plancherel_oracle(which, profile, a, u, scale)
    return closed, ref


def propagator_case(profile, x, t):
    closed = photon_propagator(profile, x, t)
    ref = propagator_oracle(profile, x, t)
    return float(np.max(np.abs(closed - ref)))


# configurations (which, a, u, scale); scale > a / (2 R) keeps +-a inside the
# support of rho_s, where the delta terms act
KERNEL_CONFIGS = [
    (1, 0.5, 1.0, 1.0), (2, 0.5, 1.0, 1.0), (3, 0.5, 1.0, 1.0),
    (1, 3.0, 0.7, 1.0), (2, 3.0, 0.7, 1.0), (3, 3.0, 0.7, 1.0),
    (1, 1.2, 2.5, 0.4), (2, 1.2, 2.5, 0.4), (3, 1.2, 2.5, 0.4),
    (1, 0.3, 0.0, 2.0), (2, 0.3, 0.2, 2.0), (3, 0.3, 0.2, 2.0),
    (1, 5.0, 1.5, 0.5), (2, 5.0, 1.5, 0.5), (3, 5.0, 1.5, 0.5),
    (3, 2.0, 4.0, 0.8),
]


def delta_active(a, scale, profile=DEFAULT_PROFILE):
    return a < 2 * profile.support_radius * scale


def selftest(profile=DEFAULT_PROFILE, seed=20240601, n_angular=20, n_propagator=10):
    """Run every kernel oracle comparison; yields (check, input, deviation, tolerance)."""
    rng = np.random.default_rng(seed)
    for i in range(n_angular):
        dev, imag = angular_case(rng)
        yield "angular", f"case {i}", dev, 1e-8
    for which, a, u, s in KERNEL_CONFIGS:
        closed, ref = kernel_case(which, profile, a, u, s)
        tag = "delta" if delta_active(a, s, profile) and which != 2 else "regular"
        yield f"c{which}", f"a={a} u={u} s={s} ({tag})", abs(closed - ref), 1e-6
    for i in range(n_propagator):
        x = rng.normal(size=3) * rng.uniform(0.0, 2.0)
        t = rng.uniform(0.0, 2.0)
        yield "propagator", f"|x|={np.linalg.norm(x):.3f} t={t:.3f}", propagator_case(profile, x, t), 1e-7
