"""Compactly supported orthonormal wavelets on periodic scaled grids.

The Daubechies filters are produced at import time by spectral
factorization of the half-band polynomial, so the construction carries
its own certificate: orthonormality and the vanishing-moment count are
checked against the requested order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import WindowTooSmall
from .geometry import GridField


def daubechies_filter(p: int) -> np.ndarray:
    """Orthonormal scaling filter with p vanishing moments (length 2p)."""
    if p < 1:
        raise ValueError("need at least one vanishing moment")
    if p == 1:
        return np.array([1.0, 1.0]) / math.sqrt(2.0)
    # half-band factor: z^{p-1} P((2 - z - 1/z)/4) with P the Bezout polynomial
    c = np.zeros(2 * p - 1)
    for k in range(p):
        term = np.array([1.0])
        for _ in range(2 * k):
            term = np.convolve(term, [1.0, -1.0])  # (z - 1)^{2k}
        term = term * math.comb(p - 1 + k, k) * (-0.25) ** k
        # shift by z^{p-1-k}
        shifted = np.zeros(2 * p - 1)
        lo = p - 1 - k
        shifted[lo : lo + term.size] += term[::-1]
        c += shifted
    roots = np.roots(c[::-1])
    inside = [r for r in roots if abs(r) < 1.0]
    q = np.array([1.0])
    for r in inside:
        q = np.convolve(q, [1.0, -r])
    q = np.real(q)
    h = np.array([1.0])
    for _ in range(p):
        h = np.convolve(h, [0.5, 0.5])
    h = np.convolve(h, q)
    h *= math.sqrt(2.0) / h.sum()
    return h


@dataclass(frozen=True)
class WaveletBasis:
    """Periodized orthonormal multiresolution basis from a scaling filter."""

    lowpass: np.ndarray
    vanishing_moments: int
    _highpass: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        h = np.asarray(self.lowpass, dtype=float)
        object.__setattr__(self, "lowpass", h)
        g = ((-1.0) ** np.arange(h.size)) * h[::-1]
        object.__setattr__(self, "_highpass", g)
        if abs(h.sum() - math.sqrt(2.0)) > 1e-10:
            raise ValueError("scaling filter must sum to sqrt(2)")
        for m in range(1, h.size // 2):
            if abs(np.dot(h[: h.size - 2 * m], h[2 * m :])) > 1e-10:
                raise ValueError("scaling filter fails orthonormality")
        k = np.arange(g.size, dtype=float)
        for m in range(self.vanishing_moments):
            if abs(np.dot(g, k**m)) > 1e-8 * g.size ** (m + 1):
                raise ValueError(f"wavelet moment {m} does not vanish")

    @property
    def highpass(self) -> np.ndarray:
        return self._highpass

    @property
    def support_radius(self) -> int:
        return self.lowpass.size - 1


def daubechies_basis(vanishing_moments: int = 4) -> WaveletBasis:
    return WaveletBasis(
        lowpass=daubechies_filter(vanishing_moments),
        vanishing_moments=vanishing_moments,
    )


# ---------------------------------------------------------------------------
# periodic one-dimensional steps, vectorized along the other axes

def _analysis_step(values: np.ndarray, taps: np.ndarray, axis: int) -> np.ndarray:
    n = values.shape[axis]
    if n % 2:
        raise ValueError("axis length must be even for an analysis step")
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(taps.size)[None, :]) % n
    taken = np.take(values, idx.reshape(-1), axis=axis)
    shape = list(values.shape)
    shape[axis : axis + 1] = [n // 2, taps.size]
    taken = taken.reshape(shape)
    return np.moveaxis(taken, axis + 1, -1) @ taps


def _synthesis_step(approx, detail, h, g, axis: int) -> np.ndarray:
    n = 2 * approx.shape[axis]
    shape = list(approx.shape)
    shape[axis] = n
    up_a = np.zeros(shape)
    up_d = np.zeros(shape)
    sl = [slice(None)] * up_a.ndim
    sl[axis] = slice(0, n, 2)
    up_a[tuple(sl)] = approx
    up_d[tuple(sl)] = detail
    out = np.zeros(shape)
    for j in range(h.size):
        out += h[j] * np.roll(up_a, j, axis=axis) + g[j] * np.roll(up_d, j, axis=axis)
    return out


@dataclass
class CoefficientPyramid:
    """Analysis output: coarse approximation plus per-level detail blocks.

    details[k] collects the blocks produced while reducing level n_max - k
    to n_max - k - 1; each block is tagged by the axis sub-steps that went
    through the highpass filter.
    """

    basis: WaveletBasis
    scaling_exponents: tuple[int, ...]
    top_level: int
    approx: np.ndarray
    details: list[dict[tuple, np.ndarray]]

    @property
    def levels(self) -> list[int]:
        return [self.top_level - k for k in range(len(self.details))]

    def level_max(self, n: int):
        """Largest absolute detail coefficient produced at level n."""
        blocks = self.details[self.top_level - n]
        return max(float(np.max(np.abs(b))) for b in blocks.values())


def _split_level(values, basis: WaveletBasis, exponents):
    """One scaled-level reduction: s_i elementary steps along axis i."""
    h, g = basis.lowpass, basis.highpass
    branches = {(): values}
    for axis, si in enumerate(exponents):
        for sub in range(si):
            new = {}
            for tag, arr in branches.items():
                new[tag] = _analysis_step(arr, h, axis)
                new[tag + ((axis, sub),)] = _analysis_step(arr, g, axis)
            branches = new
    approx = branches.pop(())
    return approx, branches


def _merge_level(approx, details, basis: WaveletBasis, exponents):
    h, g = basis.lowpass, basis.highpass
    branches = dict(details)
    branches[()] = approx
    for axis in reversed(range(len(exponents))):
        for sub in reversed(range(exponents[axis])):
            new = {}
            done = set()
            for tag in branches:
                if tag and tag[-1] == (axis, sub):
                    continue
                d_tag = tag + ((axis, sub),)
                new[tag] = _synthesis_step(branches[tag], branches[d_tag], h, g, axis)
                done.add(d_tag)
            if set(branches) != set(new) | done:
                raise ValueError("inconsistent detail tags")
            branches = new
    return branches[()]


def wavelet_coeffs(f: GridField, basis: WaveletBasis, n_min: int = 0) -> CoefficientPyramid:
    """Full periodic analysis of a grid field down to level n_min.

    The input samples are identified with the level-n scaling coefficients
    up to the L^2 normalisation 2^{-n|s|/2}, the usual convention for data
    given at the finest resolution.
    """
    s = f.scaling.exponents
    n = f.level
    if n_min >= n:
        raise ValueError("n_min must be below the data level")
    scale = 2.0 ** (-0.5 * n * sum(s))
    values = f.values * scale
    details = []
    for _ in range(n, n_min, -1):
        values, blocks = _split_level(values, basis, s)
        details.append(blocks)
    return CoefficientPyramid(
        basis=basis,
        scaling_exponents=tuple(s),
        top_level=n,
        approx=values,
        details=details,
    )


def wavelet_reconstruct(p: CoefficientPyramid, template: GridField) -> GridField:
    values = p.approx
    for blocks in reversed(p.details):
        values = _merge_level(values, blocks, p.basis, p.scaling_exponents)
    s = p.scaling_exponents
    scale = 2.0 ** (-0.5 * p.top_level * sum(s))
    return template.with_values(values / scale)


@dataclass(frozen=True)
class HolderEstimate:
    alpha: float
    slope: float
    levels: tuple[int, ...]
    level_maxima: tuple[float, ...]
    integer_warning: bool


def holder_estimate(
    f: GridField, basis: WaveletBasis, n_min: int = 0, window=None
) -> HolderEstimate:
    """Holder exponent from the decay of sup-norms of detail coefficients.

    |<xi, psi_x^{n,s}>| ~ 2^{-n|s|/2 - n alpha} gives a log2 slope of
    -(|s|/2 + alpha) against the level n.
    """
    pyramid = wavelet_coeffs(f, basis, n_min=n_min)
    levels = pyramid.levels
    if window is not None:
        levels = [n for n in levels if window[0] <= n <= window[1]]
    if len(levels) < 4:
        raise WindowTooSmall(f"only {len(levels)} dyadic levels available")
    maxima = [pyramid.level_max(n) for n in levels]
    slope, _ = np.polyfit(levels, np.log2(maxima), 1)
    alpha = -slope - 0.5 * sum(f.scaling.exponents)
    return HolderEstimate(
        alpha=float(alpha),
        slope=float(slope),
        levels=tuple(levels),
        level_maxima=tuple(maxima),
        integer_warning=abs(alpha - round(alpha)) < 0.05,
    )
