"""Structure generation: symbol families, subcriticality, grading."""
from fractions import Fraction

import pytest

from regstruct.algebra import (
    ONE,
    XI,
    I,
    Monomial,
    Scaling,
    StructureSpec,
    X,
    generate_structure,
    gpam_spec,
    phi4_spec,
    prod,
)
from regstruct.algebra.terms import mi_unit, mi_zero
from regstruct.errors import IntegerHomogeneityClash, SubcriticalityViolation


def test_gpam_negative_symbols_exact(gpam_structure):
    d = 3
    i0 = lambda t: I(mi_zero(d), t)
    ii = lambda i, t: I(mi_unit(d, i), t)
    expected = {XI, prod([i0(XI), XI])}
    expected |= {prod([X(mi_unit(d, i)), XI]) for i in (1, 2)}
    expected |= {ii(i, XI) for i in (1, 2)}
    expected |= {prod([ii(i, XI), ii(j, XI)]) for i in (1, 2) for j in (1, 2)}
    assert set(gpam_structure.negative) == expected


def test_phi4_negative_symbols_exact(phi4_structure):
    d = 4
    psi = I(mi_zero(d), XI)
    p2 = prod([psi, psi])
    p3 = prod([psi, psi, psi])
    expected = {XI, psi, p2, p3}
    expected |= {prod([p2, X(mi_unit(d, i))]) for i in (1, 2, 3)}
    expected |= {
        prod([I(mi_zero(d), p3), psi]),
        prod([I(mi_zero(d), p3), p2]),
        prod([I(mi_zero(d), p2), p2]),
    }
    assert set(phi4_structure.negative) == expected


def test_bases_are_graded_and_closed(gpam_structure):
    st = gpam_structure
    r = st.spec.r
    homs = [st.hom_value(t) for t in st.basis]
    assert homs == sorted(homs)
    assert all(h <= r for h in homs)
    symbols = set(st.symbols)
    for tau in st.basis:
        if tau.kind == "prod":
            assert all(f in symbols for f in tau.factors)
        if tau.kind == "i":
            assert tau.sub in symbols


def test_sectors(gpam_structure):
    st = gpam_structure
    assert ONE in st.u_sector
    assert all(t is ONE or t.kind in ("x", "i") for t in st.u_sector)
    # spatial derivative sectors exist, the time sector is trivial
    assert len(st.p_sectors[0]) == 1
    assert len(st.p_sectors[1]) > 1
    assert st.sector_min(st.u_sector) == 0


def test_trivial_noise_structure():
    spec = StructureSpec(
        scaling=Scaling((2, 1, 1)),
        alpha=Fraction(-9, 8),
        beta=Fraction(2),
        r=Fraction(2),
        monomials=(Monomial(1, 0, (0, 0, 0)),),
    )
    st = generate_structure(spec)
    assert set(st.negative) == {XI}


def test_supercritical_rejected():
    # cubic nonlinearity at the critical noise regularity
    with pytest.raises(SubcriticalityViolation):
        phi4_spec(alpha=Fraction(-3))
    # smooth coefficients of a distributional solution
    with pytest.raises(SubcriticalityViolation):
        gpam_spec(alpha=Fraction(-2))


def test_integer_homogeneity_clash():
    with pytest.raises(IntegerHomogeneityClash):
        generate_structure(gpam_spec(alpha=Fraction(-1)))


def test_alpha_monotonicity():
    # a rougher admissible noise can only enlarge the negative family
    st_fine = generate_structure(gpam_spec(alpha=Fraction(-9, 8)))
    st_coarse = generate_structure(gpam_spec(alpha=Fraction(-17, 16)))
    assert len(st_fine.negative) >= len(st_coarse.negative)


def test_plus_generators_positive(gpam_structure):
    st = gpam_structure
    spec = st.spec
    for k, tau in st.plus_generators:
        if tau is ONE:
            continue
        assert spec.j_positive(k, tau)
