"""Coproducts, antipode, group-like functionals and their actions.

The comodule coproduct maps symbols to (symbol, positive-symbol) pairs;
the positive algebra carries the Hopf structure.  All coefficients are
exact rationals.
"""
from __future__ import annotations

from fractions import Fraction

from .structure import StructureSpec
from .terms import (
    ONE,
    Combo,
    Expr,
    I,
    X,
    Multiindex,
    PExpr,
    mi_add,
    mi_binom,
    mi_factorial,
    mi_range,
    mi_sub,
    p_j,
    p_mul,
    p_one,
    p_x,
    prod,
)


def _pair_mul(t1, t2):
    (a1, s1), (a2, s2) = t1, t2
    return (prod((a1, a2)), p_mul(s1, s2))


def _ppair_mul(t1, t2):
    (a1, s1), (a2, s2) = t1, t2
    return (p_mul(a1, a2), p_mul(s1, s2))


def _combo_mul(c1: Combo, c2: Combo, mul) -> Combo:
    out = Combo()
    for k1, v1 in c1.items():
        for k2, v2 in c2.items():
            out.add(mul(k1, k2), v1 * v2)
    return out


class Hopf:
    """Hopf/comodule operations for a fixed structure spec."""

    def __init__(self, spec: StructureSpec):
        self.spec = spec
        self.d = spec.dim
        self._delta: dict[Expr, Combo] = {}
        self._delta_plus: dict[tuple[Multiindex, Expr], Combo] = {}
        self._antipode: dict[tuple[Multiindex, Expr], Combo] = {}
        self._delta_plus_full: dict[PExpr, Combo] = {}
        self._antipode_full: dict[PExpr, Combo] = {}
        self._j_thr: dict[Expr, tuple[int, int]] = {}
        self._degrees: dict = {}

    def degrees_below(self, bound):
        """Cached list of multiindices k with |k|_s < bound."""
        out = self._degrees.get(bound)
        if out is None:
            out = self._degrees[bound] = tuple(
                self.spec.scaling.iter_degree_below(bound)
            )
        return out

    # -- building blocks -----------------------------------------------------

    def j_hat(self, k: Multiindex, tau: Expr) -> PExpr | None:
        """J_k(tau) as a positive generator, or None when it vanishes."""
        if tau.is_poly:
            return None
        num, den = self._j_threshold(tau)
        if self.spec.scaling.degree(k) * den >= num:
            return None
        return p_j(k, tau, self.d)

    def _j_threshold(self, tau: Expr):
        """(|tau|_s + beta) as a numerator/denominator pair for fast cutoffs."""
        cached = self._j_thr.get(tau)
        if cached is None:
            v = self.spec.hom_value(tau) + self.spec.beta
            cached = self._j_thr[tau] = (v.numerator, v.denominator)
        return cached

    def _poly_split(self, k: Multiindex, left, right) -> Combo:
        out = Combo()
        for ell in mi_range(k):
            out.add((left(ell), right(mi_sub(k, ell))), mi_binom(k, ell))
        return out

    # -- comodule coproduct --------------------------------------------------

    def delta(self, tau: Expr) -> Combo:
        """Coproduct of a symbol: Combo over (Expr, PExpr) pairs."""
        cached = self._delta.get(tau)
        if cached is not None:
            return cached
        one = p_one(self.d)
        if tau.kind in ("one", "xi"):
            out = Combo.of((tau, one))
        elif tau.kind == "x":
            out = self._poly_split(tau.k, X, p_x)
        elif tau.kind == "i":
            out = Combo()
            for (a, sigma), c in self.delta(tau.sub).items():
                if not a.is_poly:
                    out.add((I(tau.k, a), sigma), c)
            bound = self.spec.hom_value(tau.sub) + self.spec.beta
            s = self.spec.scaling
            for ell in s.iter_degree_below(bound - s.degree(tau.k)):
                for m in s.iter_degree_below(bound - s.degree(tau.k) - s.degree(ell)):
                    j = p_j(mi_add(tau.k, mi_add(ell, m)), tau.sub, self.d)
                    coeff = Fraction(1, mi_factorial(ell) * mi_factorial(m))
                    out.add(
                        (X(ell), p_mul(p_x(m), j)),
                        coeff,
                    )
        else:
            out = Combo.of((ONE, one))
            for f in tau.factors:
                out = _combo_mul(out, self.delta(f), _pair_mul)
        self._delta[tau] = out
        return out

    # -- Hopf coproduct ------------------------------------------------------

    def delta_plus_gen(self, k: Multiindex, tau: Expr) -> Combo:
        """Coproduct of the generator J_k(tau): Combo over (PExpr, PExpr)."""
        key = (tuple(k), tau)
        cached = self._delta_plus.get(key)
        if cached is not None:
            return cached
        out = Combo()
        s = self.spec.scaling
        bound = self.spec.hom_value(tau) + self.spec.beta
        terms = list(self.delta(tau).items())
        for ell in self.degrees_below(bound - s.degree(k)):
            sign = Fraction((-1) ** sum(ell), mi_factorial(ell))
            k_ell = mi_add(k, ell)
            x_ell = p_x(ell)
            for (a, sigma), c in terms:
                j = self.j_hat(k_ell, a)
                if j is None:
                    continue
                out.add((j, p_mul(x_ell, sigma)), c * sign)
        out.add((p_one(self.d), p_j(k, tau, self.d)), 1)
        self._delta_plus[key] = out
        return out

    def delta_plus(self, sigma: PExpr) -> Combo:
        """Coproduct on the positive algebra: Combo over (PExpr, PExpr)."""
        cached = self._delta_plus_full.get(sigma)
        if cached is not None:
            return cached
        out = self._poly_split(sigma.k, p_x, p_x)
        for kj, tj in sigma.js:
            out = _combo_mul(out, self.delta_plus_gen(kj, tj), _ppair_mul)
        self._delta_plus_full[sigma] = out
        return out

    # -- antipode ------------------------------------------------------------

    def antipode_gen(self, k: Multiindex, tau: Expr) -> Combo:
        """Antipode of the generator J_k(tau): Combo over PExpr."""
        key = (tuple(k), tau)
        cached = self._antipode.get(key)
        if cached is not None:
            return cached
        out = Combo()
        s = self.spec.scaling
        bound = self.spec.hom_value(tau) + self.spec.beta
        terms = list(self.delta(tau).items())
        for ell in self.degrees_below(bound - s.degree(k)):
            inv_fact = Fraction(1, mi_factorial(ell))
            k_ell = mi_add(k, ell)
            x_ell = p_x(ell)
            for (a, sigma), c in terms:
                j = self.j_hat(k_ell, a)
                if j is None:
                    continue
                front = p_mul(j, x_ell)
                coeff = -c * inv_fact
                for sig_a, ca in self.antipode(sigma).items():
                    out.add(p_mul(front, sig_a), coeff * ca)
        self._antipode[key] = out
        return out

    def antipode(self, sigma: PExpr) -> Combo:
        """Antipode on the positive algebra (commutative, hence a morphism)."""
        cached = self._antipode_full.get(sigma)
        if cached is not None:
            return cached
        out = Combo.of(p_x(sigma.k), (-1) ** sum(sigma.k))
        for kj, tj in sigma.js:
            out = _combo_mul(out, self.antipode_gen(kj, tj), p_mul)
        self._antipode_full[sigma] = out
        return out

    # -- functionals and their actions ---------------------------------------

    def functional_value(self, g: dict, sigma: PExpr):
        """Value of a multiplicative functional on a positive element.

        g maps generators (k, tau) to values, with (e_i, ONE) encoding X_i.
        """
        val = 1
        for i, n in enumerate(sigma.k):
            if n:
                e_i = tuple(1 if j == i else 0 for j in range(self.d))
                val *= g[(e_i, ONE)] ** n
        for kj, tj in sigma.js:
            val *= g[(kj, tj)]
        return val

    def eval_functional(self, g: dict, combo: Combo):
        """Pair a functional with a Combo over PExpr."""
        return sum((c * self.functional_value(g, sig) for sig, c in combo.items()), 0)

    def gamma(self, g: dict, tau: Expr) -> Combo:
        """Action Gamma_g tau = (id x g) Delta tau: Combo over Expr."""
        out = Combo()
        for (a, sigma), c in self.delta(tau).items():
            out.add(a, c * self.functional_value(g, sigma))
        return out

    def group_product(self, g1: dict, g2: dict, generators) -> dict:
        """Convolution product of two multiplicative functionals."""
        out = {}
        for k, tau in generators:
            sigma = p_x(k) if tau is ONE else p_j(k, tau, self.d)
            val = 0
            for (s1, s2), c in self.delta_plus(sigma).items():
                val += c * self.functional_value(g1, s1) * self.functional_value(g2, s2)
            out[(k, tau)] = val
        return out

    def group_inverse(self, g: dict, generators) -> dict:
        """Inverse functional via the antipode."""
        out = {}
        for k, tau in generators:
            sigma = p_x(k) if tau is ONE else p_j(k, tau, self.d)
            out[(k, tau)] = self.eval_functional(g, self.antipode(sigma))
        return out

    def counit_unit_functional(self, generators) -> dict:
        """The identity functional 1^* (kills every generator)."""
        return {(k, tau): Fraction(0) for k, tau in generators}
