"""Exact-rational symbol algebra: structures, coproducts, renormalisation."""

from .families import gpam_f0, gpam_renorm_map, phi4_f0, phi4_renorm_map
from .hopf import Hopf
from .renorm import (
    RenormMap,
    check_group_member,
    composed_delta_hat,
    composed_delta_m,
    composed_m_hat,
    default_f0,
    filtration_level,
    group_compose,
    identity_map,
    p_hom_value,
)
from .structure import (
    Monomial,
    RegularityStructure,
    StructureSpec,
    generate_structure,
    gpam_spec,
    phi4_spec,
)
from .terms import (
    ONE,
    XI,
    Combo,
    Expr,
    Hom,
    I,
    PExpr,
    Scaling,
    X,
    mi_unit,
    mi_zero,
    noise_count,
    prod,
    render,
    subexpressions,
)

__all__ = [
    "Hopf", "RenormMap", "check_group_member", "group_compose",
    "composed_delta_m", "composed_delta_hat", "composed_m_hat",
    "default_f0", "filtration_level", "identity_map", "p_hom_value",
    "Monomial", "RegularityStructure", "StructureSpec", "generate_structure",
    "gpam_spec", "phi4_spec", "gpam_f0", "gpam_renorm_map", "phi4_f0",
    "phi4_renorm_map", "ONE", "XI", "Combo", "Expr", "Hom", "I", "PExpr",
    "Scaling", "X", "mi_unit", "mi_zero", "noise_count", "prod", "render",
    "subexpressions",
]
