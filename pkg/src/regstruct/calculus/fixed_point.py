"""Picard iteration for the mild multiplicative-noise heat equation.

The unknown is represented at each time slice as a modelled distribution
against a fixed spatial model; the right-hand side g(u) * noise is formed
through composition and the truncated product, reconstructed on the
diagonal, and fed to an exponential Euler step for the heat semigroup.
Each Picard sweep rebuilds the whole path from the previous iterate's
right-hand side, so the iteration is a genuine fixed-point map on paths.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..algebra.terms import ONE, XI, I, X, mi_unit, mi_zero
from ..errors import BlowupDetected, NoContraction
from ..models import Model
from .distributions import ModelledDistribution, md_compose, md_product, reconstruct

__all__ = ["FixedPointProblem", "FixedPointSolution", "solve_fixed_point"]


@dataclass
class FixedPointProblem:
    """Mild-form problem du = Lap u + g(u) xi, u(0) = u0, on [0, T]."""

    model: Model
    g_derivs: tuple  # (g, g', g'', ...) vectorized callables
    u0: np.ndarray
    T: float
    gamma: Fraction = Fraction(3, 2)
    n_steps: int = 64
    max_iter: int = 40
    tol: float = 1e-8
    cutoff: float = 1e3


@dataclass
class FixedPointSolution:
    problem: FixedPointProblem
    times: np.ndarray
    values: np.ndarray        # reconstructed slices, shape (n_steps+1, *grid)
    iterations: int
    residuals: list[float] = field(default_factory=list)

    def lift(self, m: int) -> ModelledDistribution:
        """The solution's modelled distribution at time index m."""
        return _lift(self.problem, self.values[m], _geometry(self.problem))

    def identity_residual(self) -> float:
        """Sup residual of the non-integer coefficient identity
        Q_ell u = Q_ell I F(u) at the final time."""
        prob = self.problem
        geom = _geometry(prob)
        u = _lift(prob, self.values[-1], geom)
        rhs = _rhs_distribution(prob, u)
        d = prob.model.structure.spec.dim
        worst = 0.0
        for tau, c in u.coefficients.items():
            if tau.kind != "i":
                continue
            want = rhs.coefficients.get(tau.sub)
            if want is None:
                want = np.zeros(c.shape)
            worst = max(worst, float(np.abs(c - want).max()))
        return worst


def _geometry(prob: FixedPointProblem):
    """Spectral helpers reused across Picard sweeps (cached on the model)."""
    cache = prob.model._diag_cache
    geom = cache.get("_fp_geometry")
    if geom is None:
        grid = prob.model.grid
        freqs = np.meshgrid(
            *[
                np.fft.fftfreq(n, d=L / n)
                for n, L in zip(grid.values.shape, grid.box)
            ],
            indexing="ij",
        )
        ksq = sum((2.0 * np.pi * g) ** 2 for g in freqs)
        d = prob.model.structure.spec.dim
        zero = mi_zero(d)
        Z = prob.model.Pi[I(zero, XI)]
        Z_hat = np.fft.fftn(Z)
        grad_Z = [
            np.fft.ifftn(2j * np.pi * g * Z_hat).real for g in freqs
        ]
        geom = cache["_fp_geometry"] = (freqs, ksq, grad_Z)
    return geom


def _lift(prob: FixedPointProblem, phi: np.ndarray, geom) -> ModelledDistribution:
    """Solution-sector lift: phi 1 + g(phi) I(Xi) + local gradient terms."""
    model = prob.model
    freqs, _, grad_Z = geom
    d = model.structure.spec.dim
    drop = model.drop
    zero = mi_zero(d)
    g = prob.g_derivs[0]
    g_phi = np.asarray(g(phi), dtype=float)
    phi_hat = np.fft.fftn(phi)
    coeffs = {ONE: phi, I(zero, XI): g_phi}
    for i in range(len(freqs)):
        grad_i = np.fft.ifftn(2j * np.pi * freqs[i] * phi_hat).real
        coeffs[X(mi_unit(d, drop + i))] = grad_i - g_phi * grad_Z[i]
    return ModelledDistribution(model, prob.gamma, coeffs, "solution")


def _rhs_distribution(prob: FixedPointProblem, u: ModelledDistribution):
    model = prob.model
    ones = np.ones(model.grid.values.shape)
    xi_lift = ModelledDistribution(
        model, Fraction(100), {XI: ones}, "noise"
    )
    return md_product(md_compose(prob.g_derivs, u), xi_lift)


def solve_fixed_point(prob: FixedPointProblem) -> FixedPointSolution:
    """Iterate the mild formulation until the path stops moving.

    Raises NoContraction when the Picard residuals stop decreasing before
    reaching tolerance (shrink T), and BlowupDetected when a slice exceeds
    the sup-norm cutoff.
    """
    model = prob.model
    geom = _geometry(prob)
    _, ksq, _ = geom
    n = prob.n_steps
    dt = prob.T / n
    times = dt * np.arange(n + 1)
    E = np.exp(-ksq * dt)
    # phi1(z) = (e^z - 1)/z for z = -ksq dt, the exponential Euler weight
    z = -ksq * dt
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(np.abs(z) > 1e-12, (np.exp(z) - 1.0) / z, 1.0)

    u0 = np.asarray(prob.u0, dtype=float)
    phi = np.empty((n + 1,) + u0.shape)
    phi[0] = u0
    for m in range(n):  # heat flow as the starting path
        phi[m + 1] = np.fft.ifftn(E * np.fft.fftn(phi[m])).real

    residuals: list[float] = []
    for it in range(1, prob.max_iter + 1):
        new = np.empty_like(phi)
        new[0] = u0
        for m in range(n):
            u_m = _lift(prob, phi[m], geom)
            r_m = reconstruct(_rhs_distribution(prob, u_m))
            new[m + 1] = np.fft.ifftn(
                E * np.fft.fftn(new[m]) + dt * w * np.fft.fftn(r_m)
            ).real
            norm = float(np.abs(new[m + 1]).max())
            if norm > prob.cutoff:
                raise BlowupDetected(times[m + 1], norm)
        diff = float(np.abs(new - phi).max())
        residuals.append(diff)
        phi = new
        if diff < prob.tol:
            return FixedPointSolution(prob, times, phi, it, residuals)
        if len(residuals) >= 3 and not (
            residuals[-1] < residuals[-2] < residuals[-3]
        ):
            raise NoContraction(
                f"Picard residuals stopped decreasing at T={prob.T}"
            )
    raise NoContraction(
        f"no convergence within {prob.max_iter} iterations at T={prob.T}"
    )
