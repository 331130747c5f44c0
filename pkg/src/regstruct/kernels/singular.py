"""Singular translation-invariant kernels and their mollifications.

A kernel of order ``zeta`` satisfies |D^k K(x)| <= C ||x||_s^{zeta - |k|_s}
away from the origin; the constant, measured over a window of dyadic
radii, is the ``(zeta; m)`` norm used throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.hermite import hermval

from ..algebra.terms import Multiindex, Scaling
from .geometry_ops import anisotropic_scale, midpoint_grid

__all__ = [
    "SingularKernel",
    "pam_green_kernel",
    "heat_kernel",
    "mollify_kernel",
    "estimate_order",
    "singular_norm",
]


@dataclass(frozen=True)
class SingularKernel:
    """Translation-invariant kernel, singular only at the origin.

    func maps arrays of shape (..., d) to values; deriv, when given, maps
    a multiindex to the analytic D^k callable.  order is the homogeneity
    exponent zeta (log-like kernels declare order 0 with is_log=True).
    """

    func: Callable[[np.ndarray], np.ndarray]
    order: float
    scaling: Scaling
    deriv: Callable[[Multiindex], Callable] | None = None
    is_log: bool = False
    non_anticipative: bool = False
    deriv_budget: int = 2

    def __call__(self, x) -> np.ndarray:
        return self.func(np.asarray(x, dtype=float))

    def derivative(self, k: Multiindex) -> Callable[[np.ndarray], np.ndarray]:
        """D^k as a callable; analytic when available, else central differences."""
        k = tuple(k)
        if all(ki == 0 for ki in k):
            return self.func
        if self.deriv is not None:
            return self.deriv(k)
        return _fd_derivative(self.func, k, self.scaling)


def _fd_derivative(func, k: Multiindex, scaling: Scaling, rel_step: float = 1e-3):
    """Central finite differences with per-axis steps scaled to the point."""

    def df(x):
        x = np.asarray(x, dtype=float)
        vals = func(x).astype(float).copy()
        # differentiate one axis at a time on the shifted stencil cloud
        def rec(points, k):
            for i, ki in enumerate(k):
                if ki:
                    break
            else:
                return func(points)
            rest = tuple(kj - (1 if j == i else 0) for j, kj in enumerate(k))
            r = np.maximum(np.sum(np.abs(points), axis=-1, keepdims=True), 1e-3)
            h = rel_step * r ** scaling.exponents[i]
            up = points.copy()
            up[..., i : i + 1] = points[..., i : i + 1] + h
            dn = points.copy()
            dn[..., i : i + 1] = points[..., i : i + 1] - h
            return (rec(up, rest) - rec(dn, rest)) / (2.0 * h[..., 0])

        vals = rec(x, k)
        return vals

    return df


# ---------------------------------------------------------------------------
# ready-made kernels


def pam_green_kernel(amplitude: float = 1.0 / (2.0 * math.pi)) -> SingularKernel:
    """Logarithmic kernel -amplitude * log|x| on the plane, scaling (1, 1)."""

    def func(x):
        r = np.sqrt(x[..., 0] ** 2 + x[..., 1] ** 2)
        with np.errstate(divide="ignore"):
            return -amplitude * np.log(r)

    def deriv(k):
        k = tuple(k)
        n = k[0] + k[1]
        # -a*log|x| = -a*Re log z; D^k Re f = Re(i^{k2} f^{(n)}) for holomorphic f
        coeff = -amplitude * (1j ** k[1]) * ((-1.0) ** (n - 1)) * math.factorial(n - 1)

        def df(x):
            z = x[..., 0] + 1j * x[..., 1]
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.real(coeff / z**n)

        return df

    return SingularKernel(
        func=func, order=0.0, scaling=Scaling((1, 1)), deriv=deriv,
        is_log=True, deriv_budget=4,
    )


def heat_kernel(space_dim: int = 3) -> SingularKernel:
    """Free heat kernel on R x R^d with parabolic scaling (2, 1, ..., 1)."""
    d = space_dim
    scaling = Scaling((2,) + (1,) * d)

    def func(x):
        t = x[..., 0]
        out = np.zeros(t.shape)
        pos = t > 0.0
        if np.any(pos):
            tp = t[pos]
            r2 = np.sum(x[..., 1:][pos] ** 2, axis=-1)
            out[pos] = (4.0 * math.pi * tp) ** (-0.5 * d) * np.exp(-r2 / (4.0 * tp))
        return out

    def spatial_deriv(kx):
        # d^n/dx^n exp(-x^2/4t) = (-1)^n (4t)^{-n/2} H_n(x/sqrt(4t)) exp(-x^2/4t)
        def df(x):
            t = x[..., 0]
            out = np.zeros(t.shape)
            pos = t > 0.0
            if not np.any(pos):
                return out
            tp = t[pos]
            val = (4.0 * math.pi * tp) ** (-0.5 * d)
            for i, n in enumerate(kx):
                xi = x[..., 1 + i][pos]
                u = xi / np.sqrt(4.0 * tp)
                val = val * np.exp(-(u**2))
                if n:
                    c = np.zeros(n + 1)
                    c[n] = 1.0
                    val = val * ((-1.0) ** n) * (4.0 * tp) ** (-0.5 * n) * hermval(u, c)
            out[pos] = val
            return out

        return df

    def deriv(k):
        k = tuple(k)
        kt, kx = k[0], k[1:]
        # d/dt = Laplacian: expand t-derivatives into spatial ones
        terms = {kx: 1.0}
        for _ in range(kt):
            new = {}
            for mx, c in terms.items():
                for i in range(d):
                    bumped = tuple(
                        m + (2 if j == i else 0) for j, m in enumerate(mx)
                    )
                    new[bumped] = new.get(bumped, 0.0) + c
            terms = new
        funcs = [(c, spatial_deriv(mx)) for mx, c in terms.items()]

        def df(x):
            x = np.asarray(x, dtype=float)
            total = np.zeros(x.shape[:-1])
            for c, g in funcs:
                total += c * g(x)
            return total

        return df

    return SingularKernel(
        func=func, order=float(2 - scaling.total), scaling=scaling, deriv=deriv,
        non_anticipative=True, deriv_budget=4,
    )


# ---------------------------------------------------------------------------
# mollification and measured norms


def mollify_kernel(K: SingularKernel, rho: Callable, eps: float,
                   n_quad: int = 96) -> SingularKernel:
    """K * rho_eps by midpoint quadrature, rho supported in the unit scaled ball.

    The mollifier is renormalised to unit discrete mass on the quadrature
    grid so that the smoothing is exactly mass-preserving.
    """
    d = K.scaling.dim
    pts, w = midpoint_grid([1.0] * d, n_quad if d <= 2 else 24, d)
    rvals = rho(pts)
    mass = rvals.sum() * w
    if abs(mass) < 1e-12:
        raise ValueError("mollifier has vanishing mass on the quadrature grid")
    weights = rvals * (w / mass)
    active = np.abs(weights) > 0.0
    nodes = anisotropic_scale(pts[active], K.scaling, eps)
    weights = weights[active]

    def func(x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, d)
        out = np.empty(flat.shape[0])
        block = max(1, 2_000_000 // max(nodes.shape[0], 1))
        for lo in range(0, flat.shape[0], block):
            chunk = flat[lo : lo + block]
            shifted = chunk[:, None, :] - nodes[None, :, :]
            vals = K.func(shifted)
            vals = np.where(np.isfinite(vals), vals, 0.0)
            out[lo : lo + chunk.shape[0]] = vals @ weights
        return out.reshape(x.shape[:-1])

    return SingularKernel(
        func=func, order=K.order, scaling=K.scaling, is_log=K.is_log,
        non_anticipative=False, deriv_budget=K.deriv_budget,
    )


def _unit_sphere_samples(scaling: Scaling, n_dir: int, seed: int) -> np.ndarray:
    """Random points with ||x||_s = 1 (dilation by 1/||v||_s is exact)."""
    from ..spaces import scaled_norm

    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n_dir, scaling.dim))
    norms = scaled_norm(v, scaling)
    out = np.empty_like(v)
    for i in range(n_dir):
        out[i] = anisotropic_scale(v[i], scaling, 1.0 / norms[i])
    return out


def estimate_order(K: SingularKernel | Callable, scaling: Scaling,
                   radii=None, n_dir: int = 32, seed: int = 0) -> float:
    """Log-log slope of sup_{||x||_s = r} |K(x)| against r over dyadic radii."""
    func = K.func if isinstance(K, SingularKernel) else K
    if radii is None:
        radii = 2.0 ** -np.arange(2, 9)
    radii = np.asarray(radii, dtype=float)
    dirs = _unit_sphere_samples(scaling, n_dir, seed)
    sups = []
    for r in radii:
        pts = anisotropic_scale(dirs, scaling, r)
        sups.append(np.max(np.abs(func(pts))))
    slope = np.polyfit(np.log(radii), np.log(np.maximum(sups, 1e-300)), 1)[0]
    return float(slope)


def singular_norm(K: SingularKernel | Callable, scaling: Scaling, zeta: float,
                  m: int = 0, radii=None, n_dir: int = 32, seed: int = 0) -> float:
    """Measured sup over samples of ||x||_s^{|k|_s - zeta} |D^k K(x)|, |k|_s <= m."""
    from ..spaces import scaled_norm

    if radii is None:
        radii = 2.0 ** -np.arange(1, 8)
    radii = np.asarray(radii, dtype=float)
    dirs = _unit_sphere_samples(scaling, n_dir, seed)
    best = 0.0
    for k in scaling.iter_degree_below(m + 0.5):
        if isinstance(K, SingularKernel):
            dk = K.derivative(k)
        elif all(ki == 0 for ki in k):
            dk = K
        else:
            dk = _fd_derivative(K, k, scaling)
        deg = scaling.degree(k)
        for r in radii:
            pts = anisotropic_scale(dirs, scaling, r)
            norms = scaled_norm(pts, scaling)
            vals = np.abs(dk(pts)) * norms ** (deg - zeta)
            best = max(best, float(np.max(vals)))
    return best
