"""Classical spectral solver for the renormalised 2D multiplicative-noise
heat equation.

Time stepping is exponential Euler: the heat semigroup is applied
spectrally and the nonlinearity enters through the first phi-function, the
same scheme the abstract fixed-point solver marches with, so cross-solver
comparisons are limited by modelling error only.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import BlowupDetected
from ..gaussian import Mollifier
from ..spaces import GridField

__all__ = ["solve_gpam_classical", "discrete_pam_constant", "etd1_factors"]


def etd1_factors(shape, box, dt):
    """(E, w): heat propagator and phi_1 weight on the spectral grid."""
    ksq = np.zeros(shape)
    for ax, (n, L) in enumerate(zip(shape, box)):
        k = 2.0 * math.pi * np.fft.fftfreq(n, d=L / n)
        sh = [1] * len(shape)
        sh[ax] = n
        ksq = ksq + k.reshape(sh) ** 2
    z = -ksq * dt
    E = np.exp(z)
    w = np.where(np.abs(z) > 1e-12, np.expm1(z) / np.where(z == 0, 1.0, z), 1.0)
    return E, w


def _gradients(u, box):
    out = []
    u_hat = np.fft.fftn(u)
    for ax, (n, L) in enumerate(zip(u.shape, box)):
        k = 2j * math.pi * np.fft.fftfreq(n, d=L / n)
        sh = [1] * u.ndim
        sh[ax] = n
        out.append(np.fft.ifftn(u_hat * k.reshape(sh)).real)
    return out


def _march(u0, xi, c_eps, cbar, f, g, T, n_steps, box, cutoff, stride):
    g_fun, g_prime = g
    E, w = etd1_factors(u0.shape, box, T / n_steps)
    dt = T / n_steps
    u = u0.copy()
    times = [0.0]
    slices = [u.copy()]
    for m in range(n_steps):
        gu = g_fun(u)
        nonlin = gu * xi - c_eps * gu * g_prime(u)
        if f is not None:
            grads = _gradients(u, box)
            gu2 = gu * gu
            for (i, j), fij in f.items():
                cb = 0.0 if cbar is None else cbar[i][j]
                nonlin = nonlin + fij(u) * (grads[i] * grads[j] - gu2 * cb)
        u = np.fft.ifftn(E * np.fft.fftn(u) + dt * w * np.fft.fftn(nonlin)).real
        t = (m + 1) * dt
        sup = float(np.abs(u).max())
        if not np.isfinite(sup) or sup > cutoff:
            raise BlowupDetected(t, sup)
        if (m + 1) % stride == 0 or m + 1 == n_steps:
            times.append(t)
            slices.append(u.copy())
    return np.array(times), np.array(slices)


def solve_gpam_classical(
    u0, xi_eps, c_eps: float = 0.0, cbar=None, f=None, g=None,
    T: float = 0.25, n_steps: int | None = None, box=None,
    cutoff: float = 1e3, refine_tol: float = 1e-4, max_steps: int = 4096,
):
    """Time slices of du = Lap u + f_ij(u)(d_iu d_ju - g^2 cbar_ij)
    + g(u)(xi - c g'(u)) on the periodic box.

    g is a pair (g, g') of vectorized callables (identity by default); f an
    optional {(i, j): callable} family.  With n_steps=None the step count
    doubles until the final slices of successive refinements agree to
    refine_tol in sup norm.
    """
    if isinstance(xi_eps, GridField):
        if box is None:
            box = xi_eps.box
        xi_eps = xi_eps.values
    if box is None:
        box = (1.0,) * u0.ndim
    if g is None:
        g = (lambda a: a, lambda a: np.ones_like(a))

    def run(n):
        return _march(u0, xi_eps, c_eps, cbar, f, g, T, n, box, cutoff,
                      max(1, n // 64))

    if n_steps is not None:
        return run(n_steps)
    n = 64
    times, slices = run(n)
    while n < max_steps:
        n *= 2
        times2, slices2 = run(n)
        scale = max(float(np.abs(slices2[-1]).max()), 1.0)
        if float(np.abs(slices2[-1] - slices[-1]).max()) / scale < refine_tol:
            return times2, slices2
        times, slices = times2, slices2
    return times, slices


def discrete_pam_constant(rho: Mollifier, template: GridField, eps: float) -> float:
    """E |grad Lap^{-1} xi_eps|^2 on the grid: the exact resonance of the
    discrete linear equation, whose subtraction renders it Cauchy in eps."""
    rho_hat = np.fft.fftn(rho.sampled_density(template, eps))
    ksq = np.zeros(template.values.shape)
    for ax, (n, L) in enumerate(zip(template.values.shape, template.box)):
        k = 2.0 * math.pi * np.fft.fftfreq(n, d=L / n)
        sh = [1] * template.values.ndim
        sh[ax] = n
        ksq = ksq + k.reshape(sh) ** 2
    mask = ksq > 0
    total = np.sum(np.abs(rho_hat[mask]) ** 2 / ksq[mask])
    return float(total * template.cell_volume / template.values.size)
