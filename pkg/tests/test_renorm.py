"""Renormalisation maps: derived coaction tables vs closed forms, group law."""
from fractions import Fraction

import pytest

from regstruct.algebra import (
    ONE,
    XI,
    Combo,
    I,
    X,
    check_group_member,
    composed_delta_hat,
    composed_delta_m,
    composed_m_hat,
    group_compose,
    identity_map,
    prod,
)
from regstruct.algebra.families import (
    gpam_f0,
    gpam_renorm_map,
    phi4_f0,
    phi4_renorm_map,
)
from regstruct.algebra.renorm import RenormMap
from regstruct.algebra.terms import mi_unit, mi_zero, p_j, p_mul, p_one, p_x


@pytest.fixture(scope="module")
def gpam_map(gpam_structure, gpam_hopf):
    M = gpam_renorm_map(
        Fraction(3),
        [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(5)]],
        gpam_structure,
        gpam_hopf,
    )
    M.derive()
    return M


@pytest.fixture(scope="module")
def phi4_map(phi4_structure, phi4_hopf):
    M = phi4_renorm_map(Fraction(2), Fraction(7), phi4_structure, phi4_hopf)
    M.derive()
    return M


def test_identity_map_tables(gpam_structure, gpam_hopf):
    f0, fstar = gpam_f0()
    M = identity_map(gpam_structure, gpam_hopf, f0, fstar)
    unit = p_one(3)
    for tau in f0:
        assert M.delta_m(tau) == Combo.of((tau, unit))
    j = p_j(mi_zero(3), XI, 3)
    assert M.m_hat_gen(mi_zero(3), XI) == Combo.of(j)
    assert M.delta_hat_gen(mi_zero(3), XI) == Combo.of((j, unit))


def test_gpam_closed_form(gpam_map):
    M = gpam_map
    unit = p_one(3)
    # the coaction is (M tau) x 1 on the whole family
    for tau in M.f0:
        expected = Combo()
        for a, c in M.apply(tau).items():
            expected.add((a, unit), c)
        assert M.delta_m(tau) == expected, tau
    j = p_j(mi_zero(3), XI, 3)
    assert M.m_hat_gen(mi_zero(3), XI) == Combo.of(j)
    assert M.delta_hat_gen(mi_zero(3), XI) == Combo.of((j, unit))
    ok, witness = check_group_member(M)
    assert ok, witness


def test_phi4_closed_form(phi4_map):
    M = phi4_map
    d = 4
    unit = p_one(d)
    C1, C2 = Fraction(2), Fraction(7)
    psi = I(mi_zero(d), XI)
    psi2 = prod([psi, psi])
    psi3 = prod([psi, psi, psi])
    i_psi3 = I(mi_zero(d), psi3)

    def m_tensor_one(tau):
        out = Combo()
        for a, c in M.apply(tau).items():
            out.add((a, unit), c)
        return out

    for tau in M.f0:
        factors = tau.factors if tau.kind == "prod" else (tau,)
        expected = m_tensor_one(tau)
        if i_psi3 in factors:
            # extra terms proportional to 3 C1, spatial sum
            if tau == prod([i_psi3, psi]):
                co = Combo.of(psi)
            else:
                co = Combo({psi2: Fraction(1), ONE: -C1})
            for i in (1, 2, 3):
                x_i = X(mi_unit(d, i))
                for a, c in co.items():
                    expected.add(
                        (prod([a, x_i]), p_j(mi_unit(d, i), psi, d)), 3 * C1 * c
                    )
        assert M.delta_m(tau) == expected, tau

    # renormalised integration functionals
    assert M.m_hat_gen(mi_zero(d), psi) == Combo.of(p_j(mi_zero(d), psi, d))
    assert M.m_hat_gen(mi_zero(d), psi2) == Combo.of(p_j(mi_zero(d), psi2, d))
    expected = Combo(
        {p_j(mi_zero(d), psi3, d): Fraction(1), p_j(mi_zero(d), psi, d): -3 * C1}
    )
    assert M.m_hat_gen(mi_zero(d), psi3) == expected

    # positive coaction on J(Psi^3)
    expected = Combo()
    expected.add((p_j(mi_zero(d), psi3, d), unit), 1)
    expected.add((p_j(mi_zero(d), psi, d), unit), -3 * C1)
    for i in (1, 2, 3):
        ji = p_j(mi_unit(d, i), psi, d)
        x_i = p_x(mi_unit(d, i))
        expected.add((p_mul(x_i, ji), unit), -3 * C1)
        expected.add((x_i, ji), 3 * C1)
    assert M.delta_hat_gen(mi_zero(d), psi3) == expected

    ok, witness = check_group_member(M)
    assert ok, witness


def test_gpam_group_composition(gpam_structure, gpam_hopf):
    C = [Fraction(1), Fraction(-2)]
    Cb = [
        [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(2)]],
        [[Fraction(-1), Fraction(3)], [Fraction(3), Fraction(1, 2)]],
    ]
    M1 = gpam_renorm_map(C[0], Cb[0], gpam_structure, gpam_hopf)
    M2 = gpam_renorm_map(C[1], Cb[1], gpam_structure, gpam_hopf)
    M12 = group_compose(M1, M2)
    # the family is a 5-parameter additive subgroup: constants add
    Msum = gpam_renorm_map(
        C[0] + C[1],
        [[Cb[0][i][j] + Cb[1][i][j] for j in range(2)] for i in range(2)],
        gpam_structure,
        gpam_hopf,
    )
    for tau in M12.f0:
        assert M12.apply(tau) == Msum.apply(tau)
        assert M12.delta_m(tau) == Msum.delta_m(tau)
        # composite coaction from the group law matches the derived table
        assert composed_delta_m(M1, M2, tau) == M12.delta_m(tau)
    assert composed_m_hat(M1, M2, mi_zero(3), XI) == M12.m_hat_gen(mi_zero(3), XI)
    assert composed_delta_hat(M1, M2, mi_zero(3), XI) == M12.delta_hat_gen(
        mi_zero(3), XI
    )


def test_phi4_group_composition(phi4_structure, phi4_hopf):
    d = 4
    M1 = phi4_renorm_map(Fraction(1), Fraction(-1), phi4_structure, phi4_hopf)
    M2 = phi4_renorm_map(Fraction(1, 2), Fraction(4), phi4_structure, phi4_hopf)
    M12 = group_compose(M1, M2)
    for tau in M12.f0:
        assert composed_delta_m(M1, M2, tau) == M12.delta_m(tau), tau
    psi = I(mi_zero(d), XI)
    psi3 = prod([psi] * 3)
    for tau in (psi, prod([psi, psi]), psi3):
        assert composed_m_hat(M1, M2, mi_zero(d), tau) == M12.m_hat_gen(
            mi_zero(d), tau
        )
        assert composed_delta_hat(M1, M2, mi_zero(d), tau) == M12.delta_hat_gen(
            mi_zero(d), tau
        )
    ok, witness = check_group_member(M12)
    assert ok, witness


def test_non_member_detected(gpam_structure, gpam_hopf):
    # a map hitting Xi itself cannot commute with integration/polynomials
    f0, fstar = gpam_f0()
    action = {XI: Combo({XI: Fraction(1), ONE: Fraction(1)})}
    M = RenormMap(
        structure=gpam_structure,
        hopf=gpam_hopf,
        action=action,
        f0=f0,
        fstar=fstar,
    )
    ok, _ = check_group_member(M)
    assert not ok
