"""Split of a periodic Green's function into a moment-free singular part
and a smooth compactly supported remainder.

The periodized heat kernel, cut off smoothly in time beyond lag 1, is
written as K + R where K is the reassembled dyadic decomposition of the
free-space kernel (non-anticipative, supported in the unit scaled ball,
with vanishing moments) and R absorbs the lattice images and the far
field.  Convolving a periodic forcing with K + R then reproduces the
torus heat propagation for times up to 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decompose import KernelDecomposition, radial_cutoff

__all__ = ["SymmetricSplit", "split_with_symmetry"]


def _space_axes(box, level):
    axes = []
    shape = []
    for L in box:
        n = int(round(L * 2**level))
        axes.append(np.arange(n) / 2**level)
        shape.append(n)
    return axes, tuple(shape)


def _periodized_green(t_axis, box, shape):
    """Torus heat kernel on the grid, built spectrally per time slice."""
    freqs = np.meshgrid(
        *[np.fft.fftfreq(n, d=L / n) for n, L in zip(shape, box)], indexing="ij"
    )
    ksq = sum((2.0 * np.pi * f) ** 2 for f in freqs)
    vol = float(np.prod(box))
    npts = int(np.prod(shape))
    out = np.empty((t_axis.size,) + shape)
    for i, t in enumerate(t_axis):
        spec = np.exp(-ksq * t)
        out[i] = np.fft.ifftn(spec).real * (npts / vol)
    return out


@dataclass
class SymmetricSplit:
    """Grid realisation of the K + R split on a space-time slab."""

    dec: KernelDecomposition
    box: tuple[float, ...]
    level: int
    t_axis: np.ndarray  # midpoint lags in (0, 2]
    dt: float
    K_vals: np.ndarray  # (nt, *space)
    R_vals: np.ndarray
    G_vals: np.ndarray  # time-cut periodized Green's function = K + R

    def apply(self, u_vals: np.ndarray, which: str = "both") -> np.ndarray:
        """Convolve with a periodic forcing sampled at the same midpoints.

        u_vals has shape (nt, *space); the result is the causal space-time
        convolution evaluated at the same midpoint times (midpoint rule in
        the lag, circular FFT convolution in space).
        """
        kern = {"K": self.K_vals, "R": self.R_vals, "both": self.G_vals}[which]
        nt = u_vals.shape[0]
        axes = tuple(range(1, u_vals.ndim))
        ku = np.fft.fftn(kern, axes=axes)
        # forcing at integer times: second-order average of adjacent midpoints
        u_int = np.zeros_like(u_vals)
        u_int[1:] = 0.5 * (u_vals[1:] + u_vals[:-1])
        u_int[0] = 0.5 * u_vals[0]
        fu = np.fft.fftn(u_int, axes=axes)
        cell = self.dt * float(np.prod(self.box)) / float(np.prod(u_vals.shape[1:]))
        out = np.zeros_like(u_vals)
        for i in range(nt):
            jmax = min(i + 1, kern.shape[0])
            acc = np.zeros(fu.shape[1:], dtype=complex)
            for j in range(jmax):
                acc += ku[j] * fu[i - j]
            out[i] = np.fft.ifftn(acc, axes=tuple(range(acc.ndim))).real * cell
        return out


def split_with_symmetry(dec: KernelDecomposition, box, level: int) -> SymmetricSplit:
    """Realise G = K + R on a torus grid with time lags up to 2.

    dec must decompose the free-space non-anticipative kernel whose
    periodization is the torus Green's function (the heat kernel).  The
    time cutoff equals 1 on lags <= 1, so the identity G*u = K*u + R*u
    holds for outputs at times <= 1 when u vanishes at negative times.
    """
    box = tuple(float(L) for L in box)
    s = dec.scaling.exponents
    st = s[0]
    dt = 2.0 ** (-level * st)
    nt = int(round(2.0 / dt))
    t_axis = (np.arange(nt) + 0.5) * dt
    axes, shape = _space_axes(box, level)
    G = _periodized_green(t_axis, box, shape)
    G *= radial_cutoff(t_axis).reshape((-1,) + (1,) * len(shape))

    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.empty(shape + (len(box) + 1,))
    for i, (g, L) in enumerate(zip(mesh, box)):
        pts[..., 1 + i] = g - L * np.round(g / L)
    K_vals = np.empty_like(G)
    for i, t in enumerate(t_axis):
        pts[..., 0] = t
        K_vals[i] = dec.reassemble(pts)
    R_vals = G - K_vals
    return SymmetricSplit(
        dec=dec, box=box, level=level, t_axis=t_axis, dt=dt,
        K_vals=K_vals, R_vals=R_vals, G_vals=G,
    )
