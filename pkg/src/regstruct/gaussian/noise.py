"""White-noise sampling and smooth compactly supported mollifiers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..algebra import Scaling
from ..errors import UnderResolved
from ..spaces import GridField

__all__ = [
    "NoiseRealisation",
    "Mollifier",
    "sample_noise",
    "bump_profile",
    "cosine_profile",
]


def bump_profile(q):
    """Standard smooth bump exp(-1/(1-q^2)) on |q| < 1 (unnormalised)."""
    q = np.asarray(q, dtype=float)
    out = np.zeros(q.shape)
    m = np.abs(q) < 1.0
    out[m] = np.exp(-1.0 / (1.0 - q[m] ** 2))
    return out


def cosine_profile(q):
    """Raised-cosine window cos(pi q / 2)^2 on |q| < 1 (unnormalised)."""
    q = np.asarray(q, dtype=float)
    out = np.zeros(q.shape)
    m = np.abs(q) < 1.0
    out[m] = np.cos(0.5 * math.pi * q[m]) ** 2
    return out


@dataclass(frozen=True)
class NoiseRealisation:
    """Grid white noise: i.i.d. cells scaled by cell_volume^{-1/2}."""

    field: GridField
    seed: int

    @property
    def values(self) -> np.ndarray:
        return self.field.values


def sample_noise(scaling: Scaling, level: int, box=None, seed: int = 0) -> NoiseRealisation:
    """Deterministic-under-seed white noise on the periodic scaled grid."""
    template = GridField(
        scaling, level, np.zeros(_grid_shape(scaling, level, box)), box
    )
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(template.values.shape)
    values /= math.sqrt(template.cell_volume)
    return NoiseRealisation(template.with_values(values), seed)


def _grid_shape(scaling: Scaling, level: int, box):
    if box is None:
        box = (1.0,) * scaling.dim
    return tuple(
        round(b * 2.0 ** (level * si))
        for si, b in zip(scaling.exponents, box)
    )


@dataclass
class Mollifier:
    """Smooth compactly supported density with unit integral.

    The density is a product of a time factor (for scalings whose first
    exponent exceeds 1) and a rotationally invariant spatial factor, so it
    carries the reflection and exchange symmetries that make mixed kernel
    pairings vanish.  Support lies in the unit scaled ball; the overall
    integral is normalised by quadrature once per instance.
    """

    scaling: Scaling
    profile: Callable = bump_profile
    symmetric: bool = True
    _norm: float = field(default=0.0, repr=False)

    def __post_init__(self):
        self._norm = 1.0
        self._norm = float(self._quad_mass())

    @property
    def has_time(self) -> bool:
        return self.scaling.exponents[0] > 1

    @property
    def space_dim(self) -> int:
        return self.scaling.dim - (1 if self.has_time else 0)

    def _quad_mass(self, n: int = 4096) -> float:
        r = (np.arange(n) + 0.5) / n  # radial midpoints on (0, 1)
        ds = self.space_dim
        surf = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}[ds]
        mass = float(np.sum(self.profile(r) * surf * r ** (ds - 1)) / n)
        if self.has_time:
            t = -1.0 + 2.0 * (np.arange(n) + 0.5) / n
            mass *= float(np.sum(self.profile(t)) * 2.0 / n)
        return mass / self._norm

    def space_profile(self, r):
        """Normalised spatial radial factor."""
        return self.profile(r) / self._norm

    def time_profile(self, t):
        """Time factor (identically absent for purely spatial scalings)."""
        if not self.has_time:
            raise ValueError("mollifier has no time coordinate")
        return self.profile(t)

    def __call__(self, pts):
        """Density at points with coordinates ordered like the scaling."""
        pts = np.asarray(pts, dtype=float)
        off = 1 if self.has_time else 0
        r = np.sqrt(np.sum(pts[..., off:] ** 2, axis=-1))
        out = self.profile(r) / self._norm
        if self.has_time:
            out = out * self.profile(pts[..., 0])
        return out

    def mollify(self, noise: GridField | NoiseRealisation, eps: float) -> GridField:
        """Periodic convolution with the eps-rescaled density.

        The sampled density is renormalised to unit discrete mass so that
        constants are preserved exactly on the grid.
        """
        if isinstance(noise, NoiseRealisation):
            noise = noise.field
        if max(noise.spacing) > eps / 4.0:
            raise UnderResolved(
                f"spacing {max(noise.spacing):g} exceeds eps/4 = {eps / 4.0:g}"
            )
        kernel = self.sampled_density(noise, eps)
        out = np.fft.ifftn(np.fft.fftn(kernel) * np.fft.fftn(noise.values)).real
        return noise.with_values(out * noise.cell_volume)

    def sampled_density(self, template: GridField, eps: float) -> np.ndarray:
        """rho_eps at minimal-image grid coordinates, unit discrete mass."""
        mesh = template.meshgrid()
        pts = np.stack(
            [g - L * np.round(g / L) for g, L in zip(mesh, template.box)],
            axis=-1,
        )
        scale = np.array([eps ** si for si in template.scaling.exponents])
        vals = self(pts / scale)
        return vals / (vals.sum() * template.cell_volume)
