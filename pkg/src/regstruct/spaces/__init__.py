"""Scaled geometry, wavelet analysis on the torus, Holder estimation, Taylor."""

from .geometry import GridField, grid_axes, scaled_distance, scaled_norm
from .taylor import TaylorDecomposition, boundary_set, is_lower_set, q_kernel_mass, scaled_taylor
from .wavelets import (
    CoefficientPyramid,
    HolderEstimate,
    WaveletBasis,
    daubechies_basis,
    holder_estimate,
    wavelet_coeffs,
    wavelet_reconstruct,
)

__all__ = [
    "GridField", "grid_axes", "scaled_distance", "scaled_norm",
    "TaylorDecomposition", "boundary_set", "is_lower_set", "q_kernel_mass",
    "scaled_taylor", "CoefficientPyramid", "HolderEstimate", "WaveletBasis",
    "daubechies_basis", "holder_estimate", "wavelet_coeffs",
    "wavelet_reconstruct",
]
