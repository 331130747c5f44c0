"""Modelled distributions on grids and their pointwise calculus.

A modelled distribution stores, for every grid point, a linear combination
of basis symbols with homogeneity below its order gamma.  Products,
composition with smooth functions, and differentiation act coefficientwise;
reconstruction pairs the coefficients with the model's recentered fields
on the diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..algebra.terms import (
    ONE,
    Expr,
    I,
    X,
    expr_factors,
    mi_add,
    mi_sub,
    mi_unit,
    prod,
)
from ..errors import ProductNotInStructure, SectorNotFunctionLike, WindowTooSmall
from ..models import Model, scaled_test_bump

__all__ = [
    "ModelledDistribution",
    "md_product",
    "md_compose",
    "md_differentiate",
    "poly_lift",
    "reconstruct",
    "reconstruction_defect",
]


@dataclass
class ModelledDistribution:
    """Coefficient fields over the basis, truncated below order gamma."""

    model: Model
    gamma: Fraction
    coefficients: dict[Expr, np.ndarray]
    sector: str = "generic"

    def __post_init__(self):
        self.gamma = Fraction(self.gamma)
        hv = self.model.structure.hom_value
        for tau in self.coefficients:
            if hv(tau) >= self.gamma:
                raise ValueError(
                    f"coefficient {tau!r} has homogeneity >= gamma {self.gamma}"
                )

    @property
    def support(self) -> tuple[Expr, ...]:
        return tuple(self.coefficients)

    def min_hom(self) -> Fraction:
        """Lowest homogeneity in the support (0 for the empty distribution)."""
        hv = self.model.structure.hom_value
        if not self.coefficients:
            return Fraction(0)
        return min(hv(t) for t in self.coefficients)

    def coefficient(self, tau: Expr) -> np.ndarray:
        arr = self.coefficients.get(tau)
        if arr is None:
            return np.zeros(self.model.grid.values.shape)
        return arr

    def max_abs(self) -> float:
        if not self.coefficients:
            return 0.0
        return max(float(np.abs(a).max()) for a in self.coefficients.values())

    def scaled(self, c: float) -> "ModelledDistribution":
        return ModelledDistribution(
            self.model, self.gamma,
            {t: c * a for t, a in self.coefficients.items()}, self.sector,
        )

    def difference(self, other: "ModelledDistribution") -> float:
        """Sup over symbols and points of the coefficient difference."""
        keys = set(self.coefficients) | set(other.coefficients)
        if not keys:
            return 0.0
        return max(
            float(np.abs(self.coefficient(t) - other.coefficient(t)).max())
            for t in keys
        )


def _basis_set(model: Model) -> set[Expr]:
    cache = model._diag_cache
    out = cache.get("_basis_set")
    if out is None:
        out = cache["_basis_set"] = set(model.structure.basis) | {ONE}
    return out


def md_product(
    f1: ModelledDistribution, f2: ModelledDistribution
) -> ModelledDistribution:
    """Truncated pointwise product; order (gamma1+alpha2) ^ (gamma2+alpha1)."""
    model = f1.model
    hv = model.structure.hom_value
    a1, a2 = f1.min_hom(), f2.min_hom()
    gamma = min(f1.gamma + a2, f2.gamma + a1)
    basis = _basis_set(model)
    out: dict[Expr, np.ndarray] = {}
    for t1, c1 in f1.coefficients.items():
        for t2, c2 in f2.coefficients.items():
            if hv(t1) + hv(t2) >= gamma:
                continue
            sym = prod((t1, t2))
            if sym not in basis:
                raise ProductNotInStructure(
                    f"product symbol {sym!r} is beyond the truncation"
                )
            acc = out.get(sym)
            term = c1 * c2
            out[sym] = term if acc is None else acc + term
    return ModelledDistribution(model, gamma, out, "product")


def md_compose(
    F_derivs, f: ModelledDistribution
) -> ModelledDistribution:
    """Compose a smooth scalar family with a function-like distribution.

    F_derivs is a sequence of vectorized callables (F, F', F'', ...); the
    result is the coefficientwise Taylor composition around the local mean
    a_bar = <1, f(x)>, truncated below f's order.
    """
    model = f.model
    hv = model.structure.hom_value
    gamma = f.gamma
    tilde = {t: a for t, a in f.coefficients.items() if t is not ONE}
    if any(hv(t) <= 0 for t in tilde):
        raise SectorNotFunctionLike(
            "composition needs strictly positive non-constant homogeneities"
        )
    a_bar = f.coefficient(ONE)
    if tilde:
        zeta = min(hv(t) for t in tilde)
        k_max = 0
        while k_max * zeta < gamma:
            k_max += 1
        k_max -= 1
    else:
        k_max = 0
    if len(F_derivs) <= k_max:
        raise ValueError(
            f"need {k_max + 1} derivatives of F, got {len(F_derivs)}"
        )
    # star powers of the reduced part, truncated below gamma
    basis = _basis_set(model)
    powers: list[dict[Expr, np.ndarray]] = [{ONE: np.ones(a_bar.shape)}]
    for _ in range(k_max):
        prev = powers[-1]
        nxt: dict[Expr, np.ndarray] = {}
        for t1, c1 in prev.items():
            for t2, c2 in tilde.items():
                if hv(t1) + hv(t2) >= gamma:
                    continue
                sym = prod((t1, t2))
                if sym not in basis:
                    raise ProductNotInStructure(
                        f"composition symbol {sym!r} is beyond the truncation"
                    )
                acc = nxt.get(sym)
                term = c1 * c2
                nxt[sym] = term if acc is None else acc + term
        powers.append(nxt)
    out: dict[Expr, np.ndarray] = {}
    fact = 1
    for k, power in enumerate(powers):
        if k:
            fact *= k
        dk = np.asarray(F_derivs[k](a_bar), dtype=float) / fact
        for sym, c in power.items():
            acc = out.get(sym)
            term = dk * c
            out[sym] = term if acc is None else acc + term
    return ModelledDistribution(model, gamma, out, "function")


def _differentiate_symbol(tau: Expr, i: int, d: int):
    """Leibniz derivative of a symbol: list of (symbol, integer factor)."""
    out = []
    factors = expr_factors(tau)
    for j, fac in enumerate(factors):
        rest = factors[:j] + factors[j + 1:]
        if fac.kind == "x":
            if fac.k[i]:
                out.append((prod(rest + (X(mi_sub(fac.k, mi_unit(d, i))),)),
                            fac.k[i]))
        elif fac.kind == "i":
            out.append((prod(rest + (I(mi_add(fac.k, mi_unit(d, i)), fac.sub),)),
                        1))
        elif fac.kind == "xi":
            raise ProductNotInStructure(
                "the noise symbol has no abstract derivative"
            )
    return out


def md_differentiate(f: ModelledDistribution, i: int) -> ModelledDistribution:
    """Abstract derivative in direction i (an algebra coordinate index)."""
    model = f.model
    d = model.structure.spec.dim
    s_i = model.structure.spec.scaling.exponents[i]
    gamma = f.gamma - s_i
    basis = _basis_set(model)
    out: dict[Expr, np.ndarray] = {}
    for tau, c in f.coefficients.items():
        for sym, mult in _differentiate_symbol(tau, i, d):
            if sym not in basis:
                raise ProductNotInStructure(
                    f"derivative symbol {sym!r} is beyond the truncation"
                )
            acc = out.get(sym)
            term = float(mult) * c
            out[sym] = term if acc is None else acc + term
    return ModelledDistribution(model, gamma, out, "derivative")


def poly_lift(
    model: Model, h: np.ndarray, gamma: Fraction
) -> ModelledDistribution:
    """Polynomial-sector lift of a smooth periodic grid function.

    Coefficients are spectral derivatives D^k h / k! for all spatial
    multiindices with |k|_s < gamma.
    """
    gamma = Fraction(gamma)
    grid = model.grid
    d_alg = model.structure.spec.dim
    drop = model.drop
    h_hat = np.fft.fftn(h)
    freqs = np.meshgrid(
        *[
            np.fft.fftfreq(n, d=L / n)
            for n, L in zip(h.shape, grid.box)
        ],
        indexing="ij",
    )
    out: dict[Expr, np.ndarray] = {}
    for k in model.hopf.degrees_below(gamma):
        ks = k[drop:]
        if any(k[:drop]):
            continue
        spec = h_hat
        fact = 1.0
        for i, ki in enumerate(ks):
            if ki:
                spec = spec * (2j * np.pi * freqs[i]) ** ki
            for m in range(2, ki + 1):
                fact *= m
        out[X(k)] = np.fft.ifftn(spec).real / fact
    return ModelledDistribution(model, gamma, out, "polynomial")


def reconstruct(f: ModelledDistribution) -> np.ndarray:
    """Reconstruction on the grid: the diagonal pairing R f(x) = (Pi_x f(x))(x).

    For smooth models this is the canonical choice; on the polynomial
    sector it returns exactly the constant coefficient <1, f(x)>.
    """
    if f.gamma <= 0:
        raise ValueError("reconstruction requires gamma > 0")
    model = f.model
    out = np.zeros(model.grid.values.shape)
    for tau, c in f.coefficients.items():
        if tau is ONE:
            out = out + c
        else:
            out = out + c * model.diagonal_field(tau)
    return out


def reconstruction_defect(f: ModelledDistribution, lambdas=None):
    """Scaling of sup_x |(Rf - Pi_x f(x))(phi_x^lam)| over dyadic lam.

    Returns (slope, {lam: sup}); for f in D^gamma the slope approaches
    gamma.  Base points whose bump straddles the chart seam are excluded
    (the polynomial realisation is discontinuous there).
    """
    if lambdas is None:
        lambdas = 2.0 ** -np.arange(2, 6)
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.size < 2:
        raise WindowTooSmall("need at least two scales for a slope fit")
    if 3.0 * lambdas.max() >= min(f.model.grid.box):
        raise WindowTooSmall(
            "largest scale leaves no seam-free base points on the torus"
        )
    model = f.model
    grid = model.grid
    cell = grid.cell_volume
    mesh = grid.meshgrid()
    hopf = model.hopf
    rf = reconstruct(f)
    sups = []
    for lam in lambdas:
        bump = scaled_test_bump(grid, lam)
        bump_hat_conj = np.conj(np.fft.fftn(bump))

        def corr(values):
            return np.fft.ifftn(bump_hat_conj * np.fft.fftn(values)).real * cell

        defect = corr(rf)
        for tau, c in f.coefficients.items():
            for (a, sigma), w in hopf.delta(tau).items():
                defect = defect - (
                    float(w) * c * model.functional_field(sigma)
                    * corr(model.Pi[a])
                )
        margin = 1.5 * lam
        interior = np.ones(grid.values.shape, dtype=bool)
        for g, L in zip(mesh, grid.box):
            interior &= (g >= margin) & (g <= L - margin)
        sups.append(float(np.max(np.abs(defect[interior]))))
    slope = np.polyfit(
        np.log2(lambdas), np.log2(np.maximum(sups, 1e-300)), 1
    )[0]
    return float(slope), dict(zip(lambdas.tolist(), sups))
