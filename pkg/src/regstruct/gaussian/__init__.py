"""Gaussian inputs: noise sampling, mollifiers, renormalisation constants,
and Monte Carlo variance probes for chaos components."""
from .constants import (
    PAM_AMPLITUDE,
    c_eps_pam,
    cbar_matrix,
    constants_table,
    phi4_constants,
    richardson_limit,
    write_constants_csv,
)
from .mc import GpamChaosSampler, bootstrap_slope, chaos_variance_mc
from .noise import (
    Mollifier,
    NoiseRealisation,
    bump_profile,
    cosine_profile,
    sample_noise,
)

__all__ = [
    "PAM_AMPLITUDE",
    "Mollifier",
    "NoiseRealisation",
    "GpamChaosSampler",
    "bootstrap_slope",
    "bump_profile",
    "cosine_profile",
    "c_eps_pam",
    "cbar_matrix",
    "chaos_variance_mc",
    "constants_table",
    "phi4_constants",
    "richardson_limit",
    "sample_noise",
    "write_constants_csv",
]
