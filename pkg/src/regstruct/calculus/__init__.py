"""Modelled distributions: calculus, reconstruction, Schauder, fixed point."""

from .distributions import (
    ModelledDistribution,
    md_compose,
    md_differentiate,
    md_product,
    poly_lift,
    reconstruct,
    reconstruction_defect,
)
from .fixed_point import FixedPointProblem, FixedPointSolution, solve_fixed_point
from .io import export_coefficients_csv, export_slices_csv
from .schauder import apply_Kgamma

__all__ = [
    "ModelledDistribution", "md_compose", "md_differentiate", "md_product",
    "poly_lift", "reconstruct", "reconstruction_defect", "apply_Kgamma",
    "FixedPointProblem", "FixedPointSolution", "solve_fixed_point",
    "export_coefficients_csv", "export_slices_csv",
]
