"""CSV export of solution slices and coefficient fields."""
from __future__ import annotations

import csv

import numpy as np

from ..algebra.terms import render
from .distributions import ModelledDistribution

__all__ = ["export_slices_csv", "export_coefficients_csv"]


def export_slices_csv(path, times, values, stride: int = 1) -> None:
    """Write time slices as rows (t, i1, i2, ..., value).

    stride subsamples the spatial grid uniformly in each direction.
    """
    values = np.asarray(values)
    sub = (slice(None, None, stride),) * (values.ndim - 1)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        ndim = values.ndim - 1
        writer.writerow(["t"] + [f"i{j + 1}" for j in range(ndim)] + ["value"])
        for t, slab in zip(times, values):
            slab = slab[sub]
            for idx in np.ndindex(slab.shape):
                writer.writerow(
                    [repr(float(t))]
                    + [i * stride for i in idx]
                    + [repr(float(slab[idx]))]
                )


def export_coefficients_csv(path, f: ModelledDistribution, stride: int = 1) -> None:
    """Write coefficient fields as rows (i1, i2, ..., symbol, value)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        shape = f.model.grid.values.shape
        ndim = len(shape)
        writer.writerow([f"i{j + 1}" for j in range(ndim)] + ["symbol", "value"])
        sub = (slice(None, None, stride),) * ndim
        for tau in sorted(f.coefficients, key=lambda t: t.sort_key()):
            name = render(tau)
            slab = f.coefficients[tau][sub]
            for idx in np.ndindex(slab.shape):
                writer.writerow(
                    [i * stride for i in idx] + [name, repr(float(slab[idx]))]
                )
