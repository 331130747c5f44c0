"""Grid models: canonical construction, renormalisation, axiom checks."""

from .core import (
    Model,
    build_canonical_model,
    check_model_bounds,
    renormalize_model,
    scaled_test_bump,
)

__all__ = [
    "Model", "build_canonical_model", "check_model_bounds",
    "renormalize_model", "scaled_test_bump",
]
