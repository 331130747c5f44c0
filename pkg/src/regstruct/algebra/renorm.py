"""Renormalisation maps: derived coaction tables, group law, concrete families."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import RecursionStuck
from .hopf import Hopf, _combo_mul, _ppair_mul
from .structure import RegularityStructure
from .terms import (
    XI,
    Combo,
    Expr,
    I,
    Multiindex,
    PExpr,
    combo_apply,
    p_j,
    p_mul,
    p_one,
    p_x,
)

_MAX_NEUMANN = 200


def filtration_level(hopf: Hopf, tau: Expr, _memo=None) -> int:
    """Level n of the coproduct filtration: second-slot integrands have level < n."""
    if _memo is None:
        _memo = {}
    if tau in _memo:
        return _memo[tau]
    _memo[tau] = 0  # guard against cycles (none should occur)
    integrands = {
        tj for (_, sigma), _ in hopf.delta(tau).items() for _, tj in sigma.js
    }
    lvl = 1 + max((filtration_level(hopf, t, _memo) for t in integrands), default=0)
    _memo[tau] = lvl
    return lvl


def default_f0(structure: RegularityStructure, hopf: Hopf):
    """F0 = lowest filtration stage covering every non-positive symbol."""
    memo: dict[Expr, int] = {}
    negatives = [t for t in structure.basis if structure.hom_value(t) <= 0]
    n_star = max(filtration_level(hopf, t, memo) for t in negatives)
    f0 = tuple(
        t for t in structure.symbols if filtration_level(hopf, t, memo) <= n_star
    )
    fstar = tuple(
        t for t in structure.symbols if filtration_level(hopf, t, memo) < n_star
    )
    return f0, fstar


def apply_i(k: Multiindex, combo: Combo) -> Combo:
    """Linear extension of I_k, dropping polynomial symbols."""
    out = Combo()
    for tau, c in combo.items():
        if not tau.is_poly:
            out.add(I(k, tau), c)
    return out


@dataclass
class RenormMap:
    """Linear map M on span(F0) together with its derived coaction tables."""

    structure: RegularityStructure
    hopf: Hopf
    action: dict[Expr, Combo]
    f0: tuple[Expr, ...]
    fstar: tuple[Expr, ...]
    _delta_m: dict[Expr, Combo] = field(default_factory=dict, repr=False)
    _m_hat: dict[tuple[Multiindex, Expr], Combo] = field(default_factory=dict, repr=False)
    _delta_hat: dict[tuple[Multiindex, Expr], Combo] = field(default_factory=dict, repr=False)
    _in_progress: set = field(default_factory=set, repr=False)
    _derived: bool = False

    # -- the basic maps ------------------------------------------------------

    def apply(self, tau: Expr) -> Combo:
        return self.action.get(tau, Combo.of(tau))

    def apply_combo(self, combo: Combo) -> Combo:
        return combo_apply(combo, self.apply)

    def commutes_with_integration(self):
        """Check M I_k tau = I_k M tau whenever both sides live in F0."""
        f0set = set(self.f0)
        for tau in self.f0:
            if tau.kind != "i":
                continue
            if tau.sub in f0set:
                lhs = self.apply(tau)
                rhs = apply_i(tau.k, self.apply(tau.sub))
                if lhs != rhs:
                    return False, tau
        for tau in self.f0:
            if tau.is_poly or tau is XI:
                if self.apply(tau) != Combo.of(tau):
                    return False, tau
        return True, None

    # -- derived tables ------------------------------------------------------

    def derive(self) -> None:
        """Pre-fill the coaction tables on F0 and F-star (all entries are lazy)."""
        if self._derived:
            return
        self._derived = True
        for tau in self.f0:
            self.delta_m(tau)
        for tau in self.fstar:
            if tau.is_poly:
                continue
            bound = self.structure.hom_value(tau) + self.structure.spec.beta
            for k in self.structure.spec.scaling.iter_degree_below(bound):
                self.m_hat_gen(tuple(k), tau)
                self.delta_hat_gen(tuple(k), tau)

    def delta_m(self, tau: Expr) -> Combo:
        out = self._delta_m.get(tau)
        if out is None:
            if tau in self._in_progress:
                raise RecursionStuck(f"coaction recursion cycles at {tau}")
            self._in_progress.add(tau)
            try:
                rhs = Combo()
                for (a, sigma), c in self.hopf.delta(tau).items():
                    ma = self.apply(a)
                    msig = self._m_hat_alg(sigma)
                    for a1, c1 in ma.items():
                        for s1, c2 in msig.items():
                            rhs.add((a1, s1), c * c1 * c2)
                out = self._delta_m[tau] = self._neumann_minus(rhs)
            finally:
                self._in_progress.discard(tau)
        return out

    def m_hat_gen(self, k: Multiindex, tau: Expr) -> Combo:
        key = (tuple(k), tau)
        out = self._m_hat.get(key)
        if out is None:
            out = Combo()
            for (a, sigma), c in self.delta_m(tau).items():
                j = self.hopf.j_hat(key[0], a)
                if j is None:
                    continue
                out.add(p_mul(j, sigma), c)
            self._m_hat[key] = out
        return out

    def m_hat(self, sigma: PExpr) -> Combo:
        return self._m_hat_alg(sigma)

    def delta_hat_gen(self, k: Multiindex, tau: Expr) -> Combo:
        key = (tuple(k), tau)
        out = self._delta_hat.get(key)
        if out is None:
            out = self._delta_hat[key] = self._derive_delta_hat(key[0], tau)
        return out

    def _m_hat_alg(self, sigma: PExpr) -> Combo:
        out = Combo.of(p_x(sigma.k))
        for kj, tj in sigma.js:
            out = _combo_mul(out, self.m_hat_gen(kj, tj), p_mul)
        return out

    def _neumann_minus(self, rhs: Combo) -> Combo:
        """Solve (id x mult)(Delta x id) x = rhs on (symbol, positive) pairs."""

        def dbar(combo: Combo) -> Combo:
            out = Combo()
            for (a, sigma), c in combo.items():
                for (a1, a2), c1 in self.hopf.delta(a).items():
                    if a1 == a and a2.is_unit:
                        continue
                    out.add((a1, p_mul(a2, sigma)), -c * c1)
            return out

        x = Combo()
        x.add_combo(rhs)
        term = rhs
        for _ in range(_MAX_NEUMANN):
            term = dbar(term)
            if not term:
                return x
            x.add_combo(term)
        raise RecursionStuck("Neumann series for the comodule coaction did not terminate")

    def _derive_delta_hat(self, k: Multiindex, tau: Expr) -> Combo:
        hopf = self.hopf
        rhs = Combo()
        for (s1, s2), c in hopf.delta_plus_gen(k, tau).items():
            left = Combo()
            for sa, ca in hopf.antipode(s1).items():
                for sm, cm in self._m_hat_alg(sa).items():
                    for saa, caa in hopf.antipode(sm).items():
                        left.add(saa, ca * cm * caa)
            right = self._m_hat_alg(s2)
            for l, cl in left.items():
                for rr, cr in right.items():
                    rhs.add((l, rr), c * cl * cr)
        return self._neumann_plus(rhs)

    def _neumann_plus(self, rhs: Combo) -> Combo:
        """Solve (id x mult)(Delta+ x id) x = rhs on pairs of positive elements."""

        def dbar(combo: Combo) -> Combo:
            out = Combo()
            for (s1, s2), c in combo.items():
                for (a1, a2), c1 in self.hopf.delta_plus(s1).items():
                    if a1 == s1 and a2.is_unit:
                        continue
                    out.add((a1, p_mul(a2, s2)), -c * c1)
            return out

        x = Combo()
        x.add_combo(rhs)
        term = rhs
        for _ in range(_MAX_NEUMANN):
            term = dbar(term)
            if not term:
                return x
            x.add_combo(term)
        raise RecursionStuck("Neumann series for the Hopf coaction did not terminate")


def p_hom_value(structure: RegularityStructure, sigma: PExpr) -> Fraction:
    spec = structure.spec
    val = Fraction(spec.scaling.degree(sigma.k))
    for kj, tj in sigma.js:
        val += spec.hom_value(tj) + spec.beta - spec.scaling.degree(kj)
    return val


def check_group_member(M: RenormMap):
    """True iff every extra coaction term strictly raises first-slot homogeneity."""
    ok, witness = M.commutes_with_integration()
    if not ok:
        return False, ("integration commutation", witness)
    st = M.structure
    for tau in M.f0:
        combo = M.delta_m(tau)
        if combo.get((tau, p_one(M.hopf.d)), 0) != 1:
            return False, ("missing leading term", tau)
        for (a, sigma), _ in combo.items():
            if a == tau and sigma.is_unit:
                continue
            if not st.hom_value(a) > st.hom_value(tau):
                return False, ("first-slot homogeneity", (tau, a, sigma))
    for (k, tau), combo in M._delta_hat.items():
        gen = p_j(k, tau, M.hopf.d)
        base = p_hom_value(st, gen)
        for (s1, s2), _ in combo.items():
            if s1 == gen and s2.is_unit:
                continue
            if not p_hom_value(st, s1) > base:
                return False, ("positive first-slot homogeneity", (gen, s1, s2))
    return True, None


def group_compose(M1: RenormMap, M2: RenormMap) -> RenormMap:
    """The composite map tau -> M1(M2 tau) with freshly derived tables."""
    action = {}
    for tau in M2.f0:
        img = M1.apply_combo(M2.apply(tau))
        if img != Combo.of(tau):
            action[tau] = img
    return RenormMap(
        structure=M1.structure,
        hopf=M1.hopf,
        action=action,
        f0=M1.f0,
        fstar=M1.fstar,
    )


def composed_delta_m(M1: RenormMap, M2: RenormMap, tau: Expr) -> Combo:
    """(id x mult)(Delta^{M1} x M1-hat) Delta^{M2} tau."""
    out = Combo()
    for (a, sigma), c in M2.delta_m(tau).items():
        left = M1.delta_m(a)
        right = M1.m_hat(sigma)
        for (a1, s1), c1 in left.items():
            for s2, c2 in right.items():
                out.add((a1, p_mul(s1, s2)), c * c1 * c2)
    return out


def composed_delta_hat(M1: RenormMap, M2: RenormMap, k, tau) -> Combo:
    """(id x mult)(Delta-hat^{M1} x M1-hat) Delta-hat^{M2} on a generator."""
    out = Combo()
    for (s1, s2), c in M2.delta_hat_gen(k, tau).items():
        left = _expand_delta_hat(M1, s1)
        right = M1.m_hat(s2)
        for (a1, b1), c1 in left.items():
            for b2, c2 in right.items():
                out.add((a1, p_mul(b1, b2)), c * c1 * c2)
    return out


def _expand_delta_hat(M: RenormMap, sigma: PExpr) -> Combo:
    """Multiplicative extension of the positive coaction to products of generators."""
    out = Combo.of((p_x(sigma.k), p_one(M.hopf.d)))
    for kj, tj in sigma.js:
        out = _combo_mul(out, M.delta_hat_gen(kj, tj), _ppair_mul)
    return out


def composed_m_hat(M1: RenormMap, M2: RenormMap, k, tau) -> Combo:
    """M1-hat M2-hat on a generator."""
    out = Combo()
    for sigma, c in M2.m_hat_gen(k, tau).items():
        out.add_combo(M1.m_hat(sigma), c)
    return out


def identity_map(structure: RegularityStructure, hopf: Hopf, f0, fstar) -> RenormMap:
    return RenormMap(structure=structure, hopf=hopf, action={}, f0=f0, fstar=fstar)
