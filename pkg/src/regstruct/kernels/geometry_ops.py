"""Small geometric helpers shared by the kernel machinery."""
from __future__ import annotations

import numpy as np

from ..algebra.terms import Scaling


def anisotropic_scale(x, scaling: Scaling, c: float) -> np.ndarray:
    """Dilation x_i -> c^{s_i} x_i, acting on the last axis."""
    x = np.asarray(x, dtype=float)
    factors = np.array([c**si for si in scaling.exponents])
    return x * factors


def midpoint_grid(half_widths, m: int, d: int):
    """Tensor midpoint nodes on prod_i [-b_i, b_i] and the cell weight.

    Returns (points of shape (m^d, d), scalar cell volume).
    """
    axes = []
    vol = 1.0
    for b in half_widths:
        step = 2.0 * b / m
        axes.append(-b + (np.arange(m) + 0.5) * step)
        vol *= step
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.reshape(-1) for g in mesh], axis=-1)
    return pts, vol
