"""Classical spectral solver for the renormalised cubic equation on T^3."""
from __future__ import annotations

import math

import numpy as np

from ..errors import BlowupDetected
from ..gaussian import Mollifier
from .gpam import etd1_factors

__all__ = ["solve_phi4_classical", "sample_phi4_noise"]


def solve_phi4_classical(
    u0, xi_eps, c1: float = 0.0, c2: float = 0.0, T: float = 0.1,
    n_steps: int = 64, box=None, cutoff: float = 1e3,
):
    """Time slices of du = Lap u + (3 c1 - 9 c2) u - u^3 + xi on T^3.

    xi_eps is None (deterministic flow) or an array of per-step driving
    fields of shape (n_steps, n, n, n).
    """
    if box is None:
        box = (1.0,) * u0.ndim
    if xi_eps is not None and len(xi_eps) != n_steps:
        raise ValueError("xi_eps must supply one field per time step")
    mass = 3.0 * c1 - 9.0 * c2
    dt = T / n_steps
    E, w = etd1_factors(u0.shape, box, dt)
    stride = max(1, n_steps // 64)
    u = u0.copy()
    times = [0.0]
    slices = [u.copy()]
    for m in range(n_steps):
        nonlin = mass * u - u**3
        if xi_eps is not None:
            nonlin = nonlin + xi_eps[m]
        u = np.fft.ifftn(E * np.fft.fftn(u) + dt * w * np.fft.fftn(nonlin)).real
        t = (m + 1) * dt
        sup = float(np.abs(u).max())
        if not np.isfinite(sup) or sup > cutoff:
            raise BlowupDetected(t, sup)
        if (m + 1) % stride == 0 or m + 1 == n_steps:
            times.append(t)
            slices.append(u.copy())
    return np.array(times), np.array(slices)


def sample_phi4_noise(
    rho: Mollifier, level: int, n_steps: int, T: float, eps: float,
    seed: int = 0,
):
    """Spatially mollified space-time white noise slices for the T^3 solver.

    Each step carries an independent spatial field of variance
    1/(dt cell), smoothed with the spatial factor of rho at scale eps; the
    time smearing below the step size is not resolved and is left to the
    integrator's averaging.
    """
    n = 2**level
    dt = T / n_steps
    cell = (1.0 / n) ** 3
    rng = np.random.default_rng(seed)
    white = rng.standard_normal((n_steps, n, n, n)) / math.sqrt(dt * cell)
    ax = np.arange(n) / n
    g = ax - np.round(ax)
    gx, gy, gz = np.meshgrid(g, g, g, indexing="ij")
    r = np.sqrt(gx**2 + gy**2 + gz**2) / eps
    dens = rho.space_profile(r)
    dens = dens / (dens.sum() * cell)
    d_hat = np.fft.fftn(dens)
    out = np.fft.ifftn(
        np.fft.fftn(white, axes=(1, 2, 3)) * d_hat[None], axes=(1, 2, 3)
    ).real * cell
    return out
