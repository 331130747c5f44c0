"""Taylor expansion over a lower multiindex set with kernel remainders.

The remainder attached to a boundary multiindex k is a single 1-D
integral against the density (x_m - y)^{k_m - 1}/(k_m - 1)! on [0, x_m],
where m is the last coordinate with k_m > 0, tensorised with point
masses in the other coordinates (at 0 before m, at x_i after m); its
total mass is x^k / k!.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import fixed_quad

from ..algebra.terms import Multiindex, mi_factorial

_FD_STENCILS = {
    1: (np.array([-1, 1]), np.array([-0.5, 0.5])),
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0])),
}


def is_lower_set(A) -> bool:
    """A is lower-closed: k in A implies k - e_i in A whenever k_i > 0."""
    aset = {tuple(k) for k in A}
    for k in aset:
        for i, ki in enumerate(k):
            if ki > 0:
                below = tuple(x - (1 if j == i else 0) for j, x in enumerate(k))
                if below not in aset:
                    return False
    return True


def _last_nonzero(k: Multiindex) -> int:
    for i in reversed(range(len(k))):
        if k[i]:
            return i
    raise ValueError("zero multiindex has no trailing coordinate")


def boundary_set(A) -> list[Multiindex]:
    """Minimal multiindices outside A whose trailing predecessor lies in A."""
    aset = {tuple(k) for k in A}
    if not aset:
        raise ValueError("the index set must contain at least the origin")
    out = set()
    for k in aset:
        for i in range(len(k)):
            cand = tuple(x + (1 if j == i else 0) for j, x in enumerate(k))
            if cand in aset:
                continue
            m = _last_nonzero(cand)
            below = tuple(x - (1 if j == m else 0) for j, x in enumerate(cand))
            if below in aset:
                out.add(cand)
    return sorted(out)


def finite_difference(f, k: Multiindex, x, h: float = 5e-2):
    """Central finite-difference approximation of D^k f at x."""
    x = np.asarray(x, dtype=float)

    def rec(point, k):
        for i, ki in enumerate(k):
            if ki:
                break
        else:
            return f(point)
        order = 2 if ki >= 2 else 1
        rest = tuple(
            (kj - order if j == i else kj) for j, kj in enumerate(k)
        )
        offsets, weights = _FD_STENCILS[order]
        total = 0.0
        for o, w in zip(offsets, weights):
            shifted = point.copy()
            shifted[i] += o * h
            total += w * rec(shifted, rest)
        return total / h**order

    return rec(x.copy(), tuple(k))


def q_kernel_mass(k: Multiindex, x, n_quad: int = 24) -> float:
    """Total mass of the remainder kernel Q^k(x, .) by the same quadrature."""
    k = tuple(k)
    x = np.asarray(x, dtype=float)
    m = _last_nonzero(k)
    mass = 1.0
    for i in range(m):
        mass *= x[i] ** k[i] / mi_factorial((k[i],))
    km = k[m]
    if x[m] == 0.0:
        return 0.0
    val, _ = fixed_quad(
        lambda y: (x[m] - y) ** (km - 1) / mi_factorial((km - 1,)),
        0.0, x[m], n=n_quad,
    )
    return float(mass * val)


@dataclass(frozen=True)
class TaylorDecomposition:
    main: float
    remainders: dict
    value: float

    @property
    def remainder(self) -> float:
        return float(sum(self.remainders.values()))

    @property
    def total(self) -> float:
        return self.main + self.remainder


def scaled_taylor(f, A, x, deriv=None, n_quad: int = 24) -> TaylorDecomposition:
    """Expansion of f(x) around 0 over the lower set A with exact remainders.

    deriv(k, point) may supply analytic derivatives; by default they are
    approximated by central finite differences.
    """
    A = [tuple(k) for k in A]
    if not is_lower_set(A):
        raise ValueError("index set is not lower-closed")
    x = np.asarray(x, dtype=float)
    d = x.size
    if deriv is None:
        deriv = lambda k, point: finite_difference(f, k, point)
    origin = np.zeros(d)
    main = sum(
        deriv(k, origin) * np.prod(x ** np.array(k)) / mi_factorial(k) for k in A
    )
    remainders = {}
    for k in boundary_set(A):
        m = _last_nonzero(k)
        mass = 1.0
        for i in range(m):
            mass *= x[i] ** k[i] / mi_factorial((k[i],))
        if mass == 0.0 or x[m] == 0.0:
            remainders[k] = 0.0
            continue
        km = k[m]

        def integrand(y, k=k, m=m, km=km):
            y = np.atleast_1d(y)
            vals = []
            for yi in y:
                point = x.copy()
                point[:m] = 0.0
                point[m] = yi
                vals.append(deriv(k, point))
            return np.array(vals) * (x[m] - y) ** (km - 1) / mi_factorial((km - 1,))

        val, _ = fixed_quad(integrand, 0.0, x[m], n=n_quad)
        remainders[k] = float(mass * val)
    return TaylorDecomposition(
        main=float(main), remainders=remainders, value=float(f(x))
    )
