"""Shared error types."""


class RegstructError(Exception):
    """Base class for all toolkit errors."""


class SubcriticalityViolation(RegstructError):
    """The nonlinearity fails the local subcriticality power counting."""


class IntegerHomogeneityClash(RegstructError):
    """A non-polynomial symbol (or an exponent gamma+beta) hits an integer."""


class RecursionStuck(RegstructError):
    """The renormalisation recursion cannot proceed (bad F0/Fstar closure)."""


class ProductNotInStructure(RegstructError):
    """A pointwise product requires a symbol beyond the truncation."""


class SectorNotFunctionLike(RegstructError):
    """Composition with smooth functions needs a function-like sector."""


class WindowTooSmall(RegstructError):
    """Not enough dyadic levels for a slope fit."""


class NotScaleInvariant(RegstructError):
    """Kernel fails the exact-scaling homogeneity test."""


class UnderResolved(RegstructError):
    """Grid resolution is too coarse for the requested quadrature."""


class UnresolvedKernel(UnderResolved):
    """Grid spacing too coarse relative to the mollification scale."""


class NoContraction(RegstructError):
    """Picard iteration fails to contract; shrink the time horizon."""


class BlowupDetected(RegstructError):
    """Solution norm exceeded the stopping cutoff."""

    def __init__(self, t, norm):
        super().__init__(f"blowup at t={t} (norm {norm})")
        self.t = t
        self.norm = norm


class ConfigError(RegstructError):
    """Malformed or unknown configuration input."""
