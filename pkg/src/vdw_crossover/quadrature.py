"""Composite Gauss-Legendre quadrature on finite and semi-infinite intervals.

All integrands are expected to be vectorized: they take a 1-D array of
abscissae and return an array of the same length.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, ConfigurationError


@dataclass(frozen=True)
class QuadratureSettings:
    """Node counts, interval splits and tolerances for 1-D integrals.

    ``split_points`` partition the finite part of ``[0, inf)``; beyond the
    last split the integral is taken in ``y = log(u / split)`` on panels of
    width ``exp_transform_scale``.
    """

    nodes: int = 24
    split_points: tuple = (1.0, 10.0, 50.0)
    exp_transform_scale: float = 0.5
    abs_tol: float = 1e-15
    rel_tol: float = 1e-11
    max_panels: int = 4000

    def __post_init__(self):
        object.__setattr__(self, "split_points", tuple(float(s) for s in self.split_points))
        if self.nodes < 2:
            raise ConfigurationError(f"quadrature nodes must be >= 2, got {self.nodes}")
        if not self.split_points or self.split_points[0] <= 0:
            raise ConfigurationError("split points must be positive and non-empty")
        if any(b <= a for a, b in zip(self.split_points, self.split_points[1:])):
            raise ConfigurationError(f"split points not strictly increasing: {self.split_points}")
        if self.exp_transform_scale <= 0:
            raise ConfigurationError("exp_transform_scale must be positive")
        for name in ("abs_tol", "rel_tol"):
            tol = getattr(self, name)
            if not 0 < tol <= 1e-2:
                raise ConfigurationError(f"{name} must lie in (0, 1e-2], got {tol}")


@lru_cache(maxsize=64)
def gauss_legendre(n):
    """Nodes and weights on [-1, 1] (cached, read-only)."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def fixed_gl(f, a, b, n):
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return half * np.dot(w, f(half * x + 0.5 * (a + b)))


@dataclass
class QuadResult:
    value: float
    error: float
    panels: int = 0
    evaluations: int = 0
    history: list = field(default_factory=list, repr=False)

    def __float__(self):
        return float(self.value)


def adaptive_gl(f, a, b, settings=QuadratureSettings(), scale=None):
    """Globally adaptive bisection with an n / 2n Gauss-Legendre error estimate.

    ``scale`` is the magnitude the relative tolerance refers to; by default
    it is the running estimate of this integral.
    """
    n = settings.nodes
    x1, w1 = gauss_legendre(n)
    x2, w2 = gauss_legendre(2 * n)

    def panel(lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        xs = np.concatenate((half * x1 + mid, half * x2 + mid))
        ys = f(xs)
        coarse = half * np.dot(w1, ys[:n])
        fine = half * np.dot(w2, ys[n:])
        return fine, abs(fine - coarse)

    panels = [(a, b) + panel(a, b)]
    evals = 3 * n
    while True:
        total = sum(p[2] for p in panels)
        err = sum(p[3] for p in panels)
        ref = abs(total) if scale is None else abs(scale)
        if err <= max(settings.abs_tol, settings.rel_tol * ref):
            return QuadResult(total, err, len(panels), evals)
        if len(panels) >= settings.max_panels:
            raise AccuracyError(
                f"adaptive quadrature on [{a}, {b}] not converged after {len(panels)} panels",
                estimate=total, error=err)
        i = max(range(len(panels)), key=lambda k: panels[k][3])
        lo, hi, _, _ = panels.pop(i)
        mid = 0.5 * (lo + hi)
        panels.append((lo, mid) + panel(lo, mid))
        panels.append((mid, hi) + panel(mid, hi))
        evals += 6 * n


def integrate_semi_infinite(f, settings=QuadratureSettings(), max_tail_panels=400):
    """Integrate ``f`` over ``[0, inf)``.

    The finite pieces between split points are adaptive; the tail uses the
    logarithmic map ``u = s * exp(y)`` and is truncated once two consecutive
    tail panels fall below tolerance.
    """
    edges = (0.0,) + settings.split_points
    value = 0.0
    error = 0.0
    panels = 0
    evals = 0
    for lo, hi in zip(edges, edges[1:]):
        r = adaptive_gl(f, lo, hi, settings)
        value += r.value
        error += r.error
        panels += r.panels
        evals += r.evaluations

    start = settings.split_points[-1]
    h = settings.exp_transform_scale

    def mapped(y):
        u = start * np.exp(y)
        return f(u) * u

    quiet = 0
    k = 0
    while quiet < 2:
        if k >= max_tail_panels:
            raise AccuracyError(
                f"tail of semi-infinite integral not decayed after {k} panels "
                f"(u up to {start * np.exp(k * h):.3g})", estimate=value, error=error)
        r = adaptive_gl(mapped, k * h, (k + 1) * h, settings, scale=value)
        value += r.value
        error += r.error
        panels += r.panels
        evals += r.evaluations
        k += 1
        if abs(r.value) <= max(settings.abs_tol, settings.rel_tol * abs(value)) * 1e-2:
            quiet += 1
        else:
            quiet = 0
    if error > max(settings.abs_tol, settings.rel_tol * abs(value)) * 10:
        raise AccuracyError("semi-infinite quadrature error estimate above tolerance",
                            estimate=value, error=error)
    return QuadResult(value, error, panels, evals)


def panel_nodes(edges, n):
    """Flattened composite Gauss-Legendre nodes and weights over ``edges``."""
    x, w = gauss_legendre(n)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = half * x + 0.5 * (hi + lo)
    weights = half * w
    return nodes.ravel(), np.broadcast_to(weights, nodes.shape).ravel()
