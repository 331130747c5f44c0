"""Coproduct, antipode and group-functional identities on sampled symbols."""
import random
from fractions import Fraction

from regstruct.algebra import ONE, XI, Combo, I, X, prod
from regstruct.algebra.terms import mi_unit, mi_zero, p_j, p_mul, p_one, p_x


def _sample(seq, n, seed=0):
    rng = random.Random(seed)
    seq = list(seq)
    return seq if len(seq) <= n else rng.sample(seq, n)


def _coassoc_defect(h, tau):
    lhs = Combo()
    rhs = Combo()
    for (a, s), c in h.delta(tau).items():
        for (s1, s2), c2 in h.delta_plus(s).items():
            lhs.add((a, s1, s2), c * c2)
        for (a1, s1), c2 in h.delta(a).items():
            rhs.add((a1, s1, s), c * c2)
    lhs.add_combo(rhs, -1)
    return lhs


def test_comodule_coassociativity_sampled(gpam_structure, gpam_hopf):
    for tau in _sample(gpam_structure.basis, 60):
        assert not _coassoc_defect(gpam_hopf, tau), tau


def test_plus_coassociativity_sampled(phi4_structure, phi4_hopf):
    h = phi4_hopf
    d = 4
    for k, tau in _sample(phi4_structure.plus_generators, 40):
        sigma = p_x(k) if tau is ONE else p_j(k, tau, d)
        lhs = Combo()
        rhs = Combo()
        for (s1, s2), c in h.delta_plus(sigma).items():
            for (a, b), c2 in h.delta_plus(s2).items():
                lhs.add((s1, a, b), c * c2)
            for (a, b), c2 in h.delta_plus(s1).items():
                rhs.add((a, b, s2), c * c2)
        assert lhs == rhs, sigma


def test_counit(gpam_structure, gpam_hopf):
    h = gpam_hopf
    for tau in _sample(gpam_structure.basis, 80):
        out = Combo()
        for (a, s), c in h.delta(tau).items():
            if s.is_unit:
                out.add(a, c)
        assert out == Combo.of(tau)


def test_antipode_identities_sampled(gpam_structure, gpam_hopf):
    h = gpam_hopf
    d = 3
    for k, tau in _sample(gpam_structure.plus_generators, 30, seed=1):
        sigma = p_x(k) if tau is ONE else p_j(k, tau, d)
        left = Combo()
        right = Combo()
        for (s1, s2), c in h.delta_plus(sigma).items():
            for sa, ca in h.antipode(s2).items():
                left.add(p_mul(s1, sa), c * ca)
            for sa, ca in h.antipode(s1).items():
                right.add(p_mul(sa, s2), c * ca)
        expect = Combo.of(p_one(d)) if sigma.is_unit else Combo()
        assert left == expect, sigma
        assert right == expect, sigma


def test_antipode_involution_sampled(gpam_structure, gpam_hopf):
    h = gpam_hopf
    d = 3
    for k, tau in _sample(gpam_structure.plus_generators, 25, seed=2):
        sigma = p_j(k, tau, d) if tau is not ONE else p_x(k)
        twice = Combo()
        for sa, ca in h.antipode(sigma).items():
            twice.add_combo(h.antipode(sa), ca)
        assert twice == Combo.of(sigma)


def test_known_coproducts(gpam_hopf):
    h = gpam_hopf
    d = 3
    x1 = X(mi_unit(d, 1))
    assert h.delta(x1) == Combo(
        {(x1, p_one(d)): 1, (ONE, p_x(mi_unit(d, 1))): 1}
    )
    assert h.delta(XI) == Combo.of((XI, p_one(d)))
    # the lonely planet: J(Xi) is primitive for gPAM
    j = p_j(mi_zero(d), XI, d)
    assert h.delta_plus_gen(mi_zero(d), XI) == Combo(
        {(j, p_one(d)): 1, (p_one(d), j): 1}
    )


def test_known_antipodes(gpam_hopf, phi4_hopf):
    d = 3
    assert gpam_hopf.antipode(p_x(mi_unit(d, 1))) == Combo.of(p_x(mi_unit(d, 1)), -1)
    j = p_j(mi_zero(d), XI, d)
    assert gpam_hopf.antipode_gen(mi_zero(d), XI) == Combo.of(j, -1)
    psi2 = prod([I(mi_zero(4), XI)] * 2)
    j2 = p_j(mi_zero(4), psi2, 4)
    assert phi4_hopf.antipode_gen(mi_zero(4), psi2) == Combo.of(j2, -1)
    # a spatial derivative pushes J_i(Xi) below the positive threshold: j-hat kills it
    assert gpam_hopf.antipode(p_j(mi_unit(3, 1), XI, 3)) == Combo()
    # product of two primitives
    psi = I(mi_zero(4), XI)
    ji = p_j(mi_unit(4, 1), psi, 4)
    jj = p_j(mi_unit(4, 2), psi, 4)
    assert phi4_hopf.antipode(p_mul(ji, jj)) == Combo.of(p_mul(ji, jj))


def test_group_product_unit_and_inverse(gpam_structure, gpam_hopf):
    h = gpam_hopf
    all_gens = list(gpam_structure.plus_generators)
    sample = _sample(all_gens, 25, seed=3)
    unit = h.counit_unit_functional(all_gens)
    rng = random.Random(4)
    g = {key: Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for key in unit}
    left_unit = h.group_product(unit, g, sample)
    right_unit = h.group_product(g, unit, sample)
    for key in sample:
        assert left_unit[key] == g[key]
        assert right_unit[key] == g[key]
    # g composed with its antipode inverse kills every generator
    d = 3
    for k, tau in sample:
        sigma = p_x(k) if tau is ONE else p_j(k, tau, d)
        val = sum(
            c * h.functional_value(g, s1) * h.eval_functional(g, h.antipode(s2))
            for (s1, s2), c in h.delta_plus(sigma).items()
        )
        assert val == 0, sigma


def test_gamma_action_triangular(gpam_structure, gpam_hopf):
    st_, h = gpam_structure, gpam_hopf
    gens = list(st_.plus_generators)
    rng = random.Random(5)
    g = {key: Fraction(rng.randint(-3, 3), 2) for key in gens}
    unit = h.counit_unit_functional(gens)
    for tau in _sample(st_.basis, 40, seed=6):
        out = h.gamma(g, tau)
        assert out.get(tau, 0) == 1
        for a, c in out.items():
            if a is not tau:
                assert st_.hom_value(a) < st_.hom_value(tau)
        assert h.gamma(unit, tau) == Combo.of(tau)


def test_gamma_polynomial_translation(gpam_structure, gpam_hopf):
    # on the polynomial sector the group acts by translation
    h = gpam_hopf
    d = 3
    gens = list(gpam_structure.plus_generators)
    y = (Fraction(1, 2), Fraction(-1, 3), Fraction(2))
    g = {key: Fraction(0) for key in gens}
    for i in range(d):
        g[(mi_unit(d, i), ONE)] = y[i]
    out = h.gamma(g, X((0, 2, 0)))
    # (X2 + y2)^2 expansion
    assert out == Combo(
        {X((0, 2, 0)): 1, X((0, 1, 0)): 2 * y[1], ONE: y[1] ** 2}
    )
