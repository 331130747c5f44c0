"""Classical periodic spectral solvers and Cauchy-in-epsilon studies."""
from .gpam import discrete_pam_constant, etd1_factors, solve_gpam_classical
from .phi4 import sample_phi4_noise, solve_phi4_classical
from .study import StudyResult, convergence_study, write_manifest, write_study_csv

__all__ = [
    "StudyResult",
    "convergence_study",
    "discrete_pam_constant",
    "etd1_factors",
    "sample_phi4_noise",
    "solve_gpam_classical",
    "solve_phi4_classical",
    "write_manifest",
    "write_study_csv",
]
