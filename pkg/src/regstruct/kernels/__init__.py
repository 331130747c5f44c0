"""Singular kernels, dyadic moment-free decompositions, and torus splits."""

from .decompose import (
    KernelDecomposition,
    annulus_cutoff,
    cutoff_norm,
    decompose_homogeneous,
    radial_cutoff,
)
from .singular import (
    SingularKernel,
    estimate_order,
    heat_kernel,
    mollify_kernel,
    pam_green_kernel,
    singular_norm,
)
from .split import SymmetricSplit, split_with_symmetry

__all__ = [
    "KernelDecomposition", "annulus_cutoff", "cutoff_norm",
    "decompose_homogeneous", "radial_cutoff", "SingularKernel",
    "estimate_order", "heat_kernel", "mollify_kernel", "pam_green_kernel",
    "singular_norm", "SymmetricSplit", "split_with_symmetry",
]
