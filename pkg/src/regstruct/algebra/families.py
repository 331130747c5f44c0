"""Ready-made renormalisation maps for the two worked equation families."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .hopf import Hopf
from .renorm import RenormMap
from .structure import RegularityStructure, generate_structure, gpam_spec, phi4_spec
from .terms import ONE, XI, Combo, Expr, I, X, mi_unit, mi_zero, prod


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x).limit_denominator(10**12)


# ---------------------------------------------------------------------------
# generalised parabolic Anderson model (2 space dimensions)

def gpam_f0():
    """The minimal comodule-closed family containing every non-positive symbol."""
    d = 3
    i_xi = [I(mi_unit(d, i), XI) for i in (1, 2)]
    f0 = [ONE, XI]
    f0 += [prod((X(mi_unit(d, i)), XI)) for i in (1, 2)]
    f0.append(prod((I(mi_zero(d), XI), XI)))
    f0 += i_xi
    f0 += [prod((i_xi[i], i_xi[j])) for i in range(2) for j in range(i, 2)]
    return tuple(f0), (XI,)


def gpam_renorm_map(C, Cbar, structure: RegularityStructure | None = None,
                    hopf: Hopf | None = None) -> RenormMap:
    """Map subtracting C from I(Xi)*Xi and Cbar_ij from Ii(Xi)*Ij(Xi)."""
    if structure is None:
        structure = generate_structure(gpam_spec())
    if hopf is None:
        hopf = Hopf(structure.spec)
    d = 3
    Cbar = np.asarray(Cbar)
    if Cbar.shape != (2, 2) or not np.array_equal(Cbar, Cbar.T):
        raise ValueError("Cbar must be a symmetric 2x2 array")
    f0, fstar = gpam_f0()
    i_xi = [I(mi_unit(d, i), XI) for i in (1, 2)]
    action: dict[Expr, Combo] = {}
    tau = prod((I(mi_zero(d), XI), XI))
    action[tau] = Combo.of(tau)
    action[tau].add(ONE, -_as_fraction(C))
    for i in range(2):
        for j in range(i, 2):
            tau = prod((i_xi[i], i_xi[j]))
            action[tau] = Combo.of(tau)
            action[tau].add(ONE, -_as_fraction(Cbar[i, j]))
    return RenormMap(structure=structure, hopf=hopf, action=action, f0=f0, fstar=fstar)


# ---------------------------------------------------------------------------
# dynamical quartic model (3 space dimensions)

def _psi(n: int) -> Expr:
    psi = I(mi_zero(4), XI)
    return prod([psi] * n)


def phi4_f0():
    """Comodule-closed family for the quartic model."""
    d = 4
    psi = _psi(1)
    f0 = [ONE, XI, psi, _psi(2), _psi(3)]
    f0 += [prod((_psi(2), X(mi_unit(d, i)))) for i in (1, 2, 3)]
    i_psi3 = I(mi_zero(d), _psi(3))
    i_psi2 = I(mi_zero(d), _psi(2))
    i_psi = I(mi_zero(d), psi)
    f0 += [
        prod((i_psi3, psi)),
        prod((i_psi3, _psi(2))),
        prod((i_psi2, _psi(2))),
        i_psi2,
        prod((i_psi, psi)),
        prod((i_psi, _psi(2))),
    ]
    f0 += [X(mi_unit(d, i)) for i in (1, 2, 3)]
    return tuple(f0), (psi, _psi(2), _psi(3))


def phi4_renorm_map(C1, C2, structure: RegularityStructure | None = None,
                    hopf: Hopf | None = None) -> RenormMap:
    """Wick-type map with mass constant C1 and the second-order constant C2."""
    if structure is None:
        structure = generate_structure(phi4_spec())
    if hopf is None:
        hopf = Hopf(structure.spec)
    d = 4
    C1 = _as_fraction(C1)
    C2 = _as_fraction(C2)
    f0, fstar = phi4_f0()
    psi, psi2, psi3 = _psi(1), _psi(2), _psi(3)
    i_psi3 = I(mi_zero(d), psi3)
    i_psi2 = I(mi_zero(d), psi2)
    i_psi = I(mi_zero(d), psi)

    def combo(*terms) -> Combo:
        out = Combo()
        for tau, c in terms:
            out.add(tau, c)
        return out

    action: dict[Expr, Combo] = {}
    action[psi2] = combo((psi2, 1), (ONE, -C1))
    for i in (1, 2, 3):
        xi_mono = X(mi_unit(d, i))
        action[prod((psi2, xi_mono))] = combo(
            (prod((psi2, xi_mono)), 1), (xi_mono, -C1)
        )
    action[psi3] = combo((psi3, 1), (psi, -3 * C1))
    # I(Psi^2)*(Psi^2 - C1) - C2
    action[prod((i_psi2, psi2))] = combo(
        (prod((i_psi2, psi2)), 1), (i_psi2, -C1), (ONE, -C2)
    )
    # (I(Psi^3) - 3 C1 I(Psi)) * Psi
    action[prod((i_psi3, psi))] = combo(
        (prod((i_psi3, psi)), 1), (prod((i_psi, psi)), -3 * C1)
    )
    # (I(Psi^3) - 3 C1 I(Psi)) * (Psi^2 - C1) - 3 C2 Psi
    action[prod((i_psi3, psi2))] = combo(
        (prod((i_psi3, psi2)), 1),
        (i_psi3, -C1),
        (prod((i_psi, psi2)), -3 * C1),
        (i_psi, 3 * C1 * C1),
        (psi, -3 * C2),
    )
    # I(Psi) * (Psi^2 - C1)
    action[prod((i_psi, psi2))] = combo(
        (prod((i_psi, psi2)), 1), (i_psi, -C1)
    )
    return RenormMap(structure=structure, hopf=hopf, action=action, f0=f0, fstar=fstar)
