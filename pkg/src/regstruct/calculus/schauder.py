"""The multi-level Schauder operator on modelled distributions.

K_gamma f combines three pieces: the abstract integration of each
non-polynomial coefficient, the polynomial recentering read off the
model's own generator values, and the order-raising correction that pairs
the reconstruction defect against derivatives of the kernel.  The result
gains the kernel's regularising order and intertwines reconstruction with
honest convolution.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..algebra.terms import ONE, I, X, mi_factorial, mi_zero
from ..errors import IntegerHomogeneityClash, ProductNotInStructure
from ..models.core import _fft_conv, _spatial_part, _spectral_derivative_hats
from .distributions import ModelledDistribution, _basis_set, reconstruct

__all__ = ["apply_Kgamma"]


def apply_Kgamma(f: ModelledDistribution) -> ModelledDistribution:
    """Abstract convolution with the model's singular kernel.

    Satisfies reconstruct(K_gamma f) = K * reconstruct(f) up to
    quadrature; the output order is gamma + beta.
    """
    model = f.model
    structure = model.structure
    beta = structure.spec.beta
    gamma_out = f.gamma + beta
    if gamma_out.denominator == 1:
        raise IntegerHomogeneityClash(
            f"gamma + beta = {gamma_out} is an integer"
        )
    if f.gamma <= 0:
        raise ValueError("apply_Kgamma requires gamma > 0")
    d = structure.spec.dim
    drop = model.drop
    hv = structure.hom_value
    basis = _basis_set(model)
    zero = mi_zero(d)
    cell = model.grid.cell_volume

    gens_by_symbol: dict = {}
    for k, tau in structure.plus_generators:
        if tau is not ONE:
            gens_by_symbol.setdefault(tau, []).append(k)

    out: dict = {}

    def add(sym, arr):
        acc = out.get(sym)
        out[sym] = arr if acc is None else acc + arr

    # abstract integration and the model's own recentering values
    for tau, c in f.coefficients.items():
        if tau.is_poly:
            continue
        sym = I(zero, tau)
        if sym not in basis:
            raise ProductNotInStructure(
                f"integration symbol {sym!r} is beyond the truncation"
            )
        add(sym, c)
        for k in gens_by_symbol.get(tau, ()):
            add(X(k), -c * model.f[(k, tau)] / mi_factorial(k))

    # order-raising part: pair the defect against kernel derivatives
    rf = reconstruct(f)
    hat_for = _spectral_derivative_hats(
        model.kernel_grids[(0,) * model.grid.scaling.dim], model.grid
    )
    for k in model.hopf.degrees_below(gamma_out):
        ks = _spatial_part(k, drop)
        if ks is None:
            continue
        hat = hat_for(ks)
        pairing = _fft_conv(hat, rf, cell)
        for tau, c in f.coefficients.items():
            for (a, sigma), w in model.hopf.delta(tau).items():
                pairing = pairing - (
                    float(w) * c * model.functional_field(sigma)
                    * _fft_conv(hat, model.Pi[a], cell)
                )
        add(X(k), pairing / mi_factorial(k))

    out = {sym: arr for sym, arr in out.items() if hv(sym) < gamma_out}
    return ModelledDistribution(model, gamma_out, out, "schauder")
