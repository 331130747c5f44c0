"""Scaled quasi-metric geometry and periodic grid fields."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebra import Scaling


def scaled_norm(x, s: Scaling):
    """Scaled norm ||x||_s = sum_i |x_i|^{1/s_i} (vectorized over the last axis)."""
    x = np.asarray(x, dtype=float)
    parts = [np.abs(x[..., i]) ** (1.0 / si) for i, si in enumerate(s.exponents)]
    return sum(parts)


def scaled_distance(x, y, s: Scaling, box=None):
    """Quasi-distance d_s(x, y); minimal-image differences on a periodic box."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    diff = x - y
    if box is not None:
        box = np.asarray(box, dtype=float)
        diff = diff - box * np.round(diff / box)
    return scaled_norm(diff, s)


def grid_axes(scaling: Scaling, level: int, box=None):
    """Per-coordinate grid coordinates at spacing 2^{-level*s_i} on the box."""
    if box is None:
        box = (1.0,) * scaling.dim
    axes = []
    for si, bi in zip(scaling.exponents, box, strict=True):
        h = 2.0 ** (-level * si)
        npts = bi / h
        if abs(npts - round(npts)) > 1e-9:
            raise ValueError("box length must be a multiple of the grid spacing")
        axes.append(np.arange(round(npts)) * h)
    return axes


@dataclass(frozen=True)
class GridField:
    """Samples of a periodic field on the scaled dyadic grid Lambda_n^s.

    The grid in coordinate i has spacing 2^{-level*s_i}; values are indexed
    in the same coordinate order as the scaling.
    """

    scaling: Scaling
    level: int
    values: np.ndarray
    box: tuple[float, ...] | None = None

    def __post_init__(self):
        box = self.box if self.box is not None else (1.0,) * self.scaling.dim
        object.__setattr__(self, "box", tuple(float(b) for b in box))
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        expected = tuple(
            round(b * 2.0 ** (self.level * si))
            for si, b in zip(self.scaling.exponents, self.box, strict=True)
        )
        if vals.shape != expected:
            raise ValueError(f"values shape {vals.shape} != grid shape {expected}")

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(2.0 ** (-self.level * si) for si in self.scaling.exponents)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self):
        return grid_axes(self.scaling, self.level, self.box)

    def meshgrid(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    def with_values(self, values) -> "GridField":
        return GridField(self.scaling, self.level, values, self.box)
