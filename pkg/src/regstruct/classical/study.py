"""Cauchy-in-epsilon diagnostics for the linear multiplicative equation.

One white-noise realisation is fixed on a fine grid and mollified at every
epsilon in a dyadic window.  With the resonance constant subtracted the
solutions form a Cauchy sequence; without it the slice means drift by the
exponential of the diverging constant.
"""
from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from ..algebra import Scaling
from ..gaussian import Mollifier, sample_noise
from .gpam import discrete_pam_constant, solve_gpam_classical

__all__ = ["StudyResult", "convergence_study", "write_study_csv", "write_manifest"]


@dataclass
class StudyResult:
    eps: list[float]
    constants: list[float]
    finals: list[np.ndarray]          # renormalised final slices
    unren_means: list[float]          # spatial means, unrenormalised
    T: float
    seed: int

    @property
    def distances(self) -> list[float]:
        """Sup distance between consecutive renormalised solutions."""
        return [
            float(np.abs(a - b).max())
            for a, b in zip(self.finals, self.finals[1:])
        ]

    @property
    def ratios(self) -> list[float]:
        d = self.distances
        return [b / a for a, b in zip(d, d[1:]) if a > 0]

    def unren_log_growth(self) -> list[float]:
        """Measured log increments of the unrenormalised slice means."""
        m = self.unren_means
        return [float(np.log(b / a)) for a, b in zip(m, m[1:])]

    def predicted_log_growth(self) -> list[float]:
        """T (C(eps/2) - C(eps)): the drift of the constant-shift factor."""
        c = self.constants
        return [self.T * (b - a) for a, b in zip(c, c[1:])]

    def rows(self):
        out = []
        d = [float("nan")] + self.distances
        for i, eps in enumerate(self.eps):
            out.append((eps, self.constants[i], d[i], self.unren_means[i]))
        return out


def convergence_study(
    equation: str, rho: Mollifier, eps_list, seed: int = 0,
    level: int = 7, T: float = 0.25, n_steps: int = 128, u0=None,
) -> StudyResult:
    """Pairwise solution distances for one noise realisation across eps.

    Only the linear multiplicative equation is supported; eps_list must be
    decreasing so consecutive rows compare a scale with its refinement.
    """
    if equation not in ("pam", "gpam-linear"):
        raise ValueError(f"unsupported equation {equation!r} for the study")
    eps_list = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    noise = sample_noise(Scaling((1, 1)), level, seed=seed)
    n = noise.values.shape[0]
    if u0 is None:
        ax = np.arange(n) / n
        gx, gy = np.meshgrid(ax, ax, indexing="ij")
        u0 = 1.0 + 0.2 * np.sin(2 * np.pi * gx) * np.cos(2 * np.pi * gy)
    constants, finals, unren_means = [], [], []
    for eps in eps_list:
        xi = rho.mollify(noise, eps)
        c_eps = discrete_pam_constant(rho, noise.field, eps)
        _, ren = solve_gpam_classical(
            u0, xi, c_eps=c_eps, T=T, n_steps=n_steps
        )
        constants.append(c_eps)
        finals.append(ren[-1])
        # constant potential shift acts as an exact exponential factor
        unren_means.append(float(np.mean(ren[-1])) * float(np.exp(T * c_eps)))
    return StudyResult(eps_list, constants, finals, unren_means, T, seed)


def write_study_csv(path, result: StudyResult) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eps", "constant", "distance_to_coarser", "unren_mean"])
        for row in result.rows():
            writer.writerow([repr(float(v)) for v in row])


def write_manifest(path, **params) -> None:
    """JSON run manifest with a content hash of its own parameters."""
    payload = {k: params[k] for k in sorted(params)}
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    payload["config_hash"] = hashlib.sha256(blob).hexdigest()
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=str)
        fh.write("\n")
