"""Structure generation: from a nonlinearity spec to the graded symbol basis."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import IntegerHomogeneityClash, SubcriticalityViolation
from .terms import (
    HOM_ZERO,
    ONE,
    XI,
    Expr,
    Hom,
    I,
    Multiindex,
    Scaling,
    X,
    mi_range,
    prod,
    subexpressions,
)


@dataclass(frozen=True)
class Monomial:
    """Generator Xi^m U^n P^k of the nonlinearity's monomial set.

    Denotes the downward-closed family of all Xi^m' U^n' P^k' with
    m' <= xi_power, k' <= p_powers and n' <= u_power (any n' when
    u_power is None, encoding a generic smooth coefficient).
    """

    xi_power: int
    u_power: int | None
    p_powers: Multiindex

    def __post_init__(self):
        object.__setattr__(self, "p_powers", tuple(self.p_powers))


@dataclass(frozen=True)
class StructureSpec:
    """Inputs determining a regularity structure: scaling, exponents, monomials."""

    scaling: Scaling
    alpha: Fraction
    beta: Fraction
    r: Fraction
    monomials: tuple[Monomial, ...]
    _hom_cache: dict = field(default_factory=dict, compare=False, repr=False)
    _hom_value_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "monomials", tuple(self.monomials))
        if self.r <= 0:
            raise ValueError("truncation r must be positive")
        if self.alpha >= 0:
            raise ValueError("noise regularity alpha must be negative")
        self._check_subcritical()

    @property
    def dim(self) -> int:
        return self.scaling.dim

    # -- homogeneity ---------------------------------------------------------

    def hom(self, tau: Expr) -> Hom:
        cached = self._hom_cache.get(tau)
        if cached is not None:
            return cached
        if tau.kind == "one":
            h = HOM_ZERO
        elif tau.kind == "xi":
            h = Hom(Fraction(0), 1)
        elif tau.kind == "x":
            h = Hom(Fraction(self.scaling.degree(tau.k)), 0)
        elif tau.kind == "i":
            h = self.hom(tau.sub).shift(self.beta - self.scaling.degree(tau.k))
        else:
            h = HOM_ZERO
            for f in tau.factors:
                h = h + self.hom(f)
        self._hom_cache[tau] = h
        return h

    def hom_value(self, tau: Expr) -> Fraction:
        cached = self._hom_value_cache.get(tau)
        if cached is None:
            cached = self._hom_value_cache[tau] = self.hom(tau).eval(self.alpha)
        return cached

    def j_positive(self, k: Multiindex, tau: Expr) -> bool:
        """Whether J_k(tau) survives: |k|_s < |tau|_s + beta, tau non-polynomial."""
        if tau.is_poly:
            return False
        return self.scaling.degree(k) < self.hom_value(tau) + self.beta

    # -- subcriticality ------------------------------------------------------

    def _check_subcritical(self):
        a, b, s = self.alpha, self.beta, self.scaling
        pc = [a + b - Fraction(si) for si in s.exponents]
        for mono in self.monomials:
            if len(mono.p_powers) != s.dim:
                raise ValueError("p_powers dimension mismatch")
            for i, ki in enumerate(mono.p_powers):
                if ki > 0 and not b > s.exponents[i]:
                    raise SubcriticalityViolation(
                        f"derivative factor P_{i + 1} needs beta > s_{i + 1}"
                    )
            if mono.u_power is None and not a + b > 0:
                raise SubcriticalityViolation(
                    "smooth coefficient (unbounded U power) needs alpha + beta > 0"
                )
            if mono.xi_power >= 1:
                if mono.u_power != 0 and a + b <= 0:
                    raise SubcriticalityViolation("Xi term multiplies a distributional u")
                for i, ki in enumerate(mono.p_powers):
                    if ki > 0 and a + b <= s.exponents[i]:
                        raise SubcriticalityViolation(
                            "Xi term multiplies a distributional derivative of u"
                        )
            qs = range(0, (mono.u_power if mono.u_power is not None else 1) + 1)
            for p in range(mono.xi_power + 1):
                for k in mi_range(mono.p_powers):
                    for q in qs:
                        if p == 0 and q == 0 and not any(k):
                            continue
                        if (p, q) == (1, 0) and not any(k):
                            continue
                        val = p * a + q * (a + b) + sum(ki * ci for ki, ci in zip(k, pc))
                        if not val > a:
                            raise SubcriticalityViolation(
                                f"monomial Xi^{p} U^{q} P^{k} has homogeneity {val} <= alpha"
                            )


@dataclass(frozen=True)
class RegularityStructure:
    """Finite graded basis with sector index sets and plus-algebra generators."""

    spec: StructureSpec
    basis: tuple[Expr, ...]             # homogeneity <= r, canonical order
    symbols: tuple[Expr, ...]           # basis plus subexpression closure
    u_sector: tuple[Expr, ...]
    p_sectors: tuple[tuple[Expr, ...], ...]
    w_sector: tuple[Expr, ...]
    plus_generators: tuple[tuple[Multiindex, Expr], ...]

    @property
    def negative(self) -> tuple[Expr, ...]:
        return tuple(t for t in self.basis if self.spec.hom_value(t) < 0)

    def hom_value(self, tau: Expr) -> Fraction:
        return self.spec.hom_value(tau)

    def sector_min(self, sector: tuple[Expr, ...]) -> Fraction:
        return min(self.spec.hom_value(t) for t in sector)


def _choose_multiset(elems, homs, max_count, budget):
    """Multisets of elems (repetition allowed) of size <= max_count (any size
    when None) with homogeneity sum <= budget.  All homs must be positive when
    max_count is None.  Yields (tuple of elems, hom sum)."""

    def rec(start, remaining_count, budget_left):
        yield (), Fraction(0)
        if remaining_count is not None and remaining_count == 0:
            return
        for i in range(start, len(elems)):
            h = homs[i]
            if h > 0 and h > budget_left:
                break  # sorted ascending, later elements are no smaller
            for rest, hr in rec(
                i,
                None if remaining_count is None else remaining_count - 1,
                budget_left - h,
            ):
                yield (elems[i],) + rest, h + hr

    yield from rec(0, max_count, budget)


def generate_structure(spec: StructureSpec) -> RegularityStructure:
    """Fixed point of the symbol recursion intersected with {|tau|_s <= r}."""
    s = spec.scaling
    a, b, r = spec.alpha, spec.beta, spec.r
    d = s.dim
    p_min = [min(a + b - si, Fraction(0)) for si in s.exponents]

    # Homogeneity caps for elements eligible to fill a U or P_i slot: the cap
    # leaves room for the most negative co-factors a monomial can carry.
    def other_min(mono: Monomial, slot: str, coord: int | None) -> Fraction:
        val = mono.xi_power * a
        for i, ki in enumerate(mono.p_powers):
            n = ki - (1 if slot == "p" and coord == i else 0)
            val += n * p_min[i]
        return val

    u_cap = r - min(
        (other_min(m, "u", None) for m in spec.monomials if m.u_power != 0),
        default=Fraction(0),
    )
    used_p = [any(m.p_powers[i] > 0 for m in spec.monomials) for i in range(d)]
    p_caps = [
        r - min(other_min(m, "p", i) for m in spec.monomials if m.p_powers[i] > 0)
        if used_p[i]
        else None
        for i in range(d)
    ]
    w_cap = max(
        [r, u_cap - b]
        + [p_caps[i] - b + s.exponents[i] for i in range(d) if used_p[i]]
    )

    def check_hom(tau: Expr) -> Fraction:
        val = spec.hom_value(tau)
        if not tau.is_poly and val.denominator == 1:
            raise IntegerHomogeneityClash(f"|{tau}|_s = {val} is an integer")
        return val

    # scaled degrees are integers: |k|_s <= cap means |k|_s < floor(cap) + 1
    polys_u = [X(k) for k in s.iter_degree_below(math.floor(u_cap) + 1) if any(k)]
    polys_p = [
        [X(k) for k in s.iter_degree_below(math.floor(p_caps[i]) + 1) if any(k)]
        if used_p[i]
        else []
        for i in range(d)
    ]

    w: set[Expr] = set()
    u: set[Expr] = set(polys_u)
    p: list[set[Expr]] = [set(polys_p[i]) for i in range(d)]

    hom_key = lambda t: (spec.hom_value(t), t.sort_key())

    while True:
        u_elems = sorted(u, key=hom_key)
        u_homs = [spec.hom_value(t) for t in u_elems]
        p_elems = [sorted(p[i], key=hom_key) for i in range(d)]
        p_homs = [[spec.hom_value(t) for t in p_elems[i]] for i in range(d)]
        new_w = set(w)
        for mono in spec.monomials:
            # minimal homogeneity the P slots from coordinate i onward can carry
            tail_min = [Fraction(0)] * (d + 1)
            for i in reversed(range(d)):
                tail_min[i] = tail_min[i + 1] + mono.p_powers[i] * p_min[i]

            def rec_p(i, budget_left, acc, base_factors):
                if i == d:
                    tau = prod(base_factors + acc)
                    if spec.hom_value(tau) <= w_cap:
                        new_w.add(tau)
                    return
                ki = mono.p_powers[i]
                if ki == 0:
                    rec_p(i + 1, budget_left, acc, base_factors)
                    return
                for fac, h in _choose_multiset(
                    p_elems[i], p_homs[i], ki, budget_left - tail_min[i + 1]
                ):
                    rec_p(i + 1, budget_left - h, acc + list(fac), base_factors)

            for xi_p in range(mono.xi_power + 1):
                base = xi_p * a
                budget = w_cap - base
                for u_fac, hu in _choose_multiset(
                    u_elems, u_homs, mono.u_power, budget - tail_min[0]
                ):
                    rec_p(0, budget - hu, [], [XI] * xi_p + list(u_fac))
        if new_w == w:
            break
        w = new_w
        for tau in w:
            check_hom(tau)
            if not tau.is_poly:
                if spec.hom_value(tau) + b <= u_cap:
                    u.add(I((0,) * d, tau))
                for i in range(d):
                    if used_p[i] and spec.hom_value(tau) + b - s.exponents[i] <= p_caps[i]:
                        p[i].add(I(tuple(1 if j == i else 0 for j in range(d)), tau))

    everything = w | u | {ONE, XI}
    for tau in everything:
        check_hom(tau)
    basis = sorted(
        (t for t in everything if spec.hom_value(t) <= r),
        key=lambda t: (spec.hom_value(t), t.sort_key()),
    )
    closure: set[Expr] = set()
    for tau in basis:
        closure |= subexpressions(tau)
    symbols = sorted(
        set(basis) | closure, key=lambda t: (spec.hom_value(t), t.sort_key())
    )

    plus_gens: list[tuple[Multiindex, Expr]] = []
    for i in range(d):
        plus_gens.append((tuple(1 if j == i else 0 for j in range(d)), ONE))
    for tau in symbols:
        if tau.is_poly:
            continue
        bound = spec.hom_value(tau) + b
        for k in s.iter_degree_below(bound):
            plus_gens.append((tuple(k), tau))

    within_r = lambda ts: tuple(
        t
        for t in sorted(ts, key=lambda t: (spec.hom_value(t), t.sort_key()))
        if spec.hom_value(t) <= r
    )
    return RegularityStructure(
        spec=spec,
        basis=tuple(basis),
        symbols=tuple(symbols),
        u_sector=within_r(u | {ONE}),
        p_sectors=tuple(within_r(p[i] | {ONE}) for i in range(d)),
        w_sector=within_r(w),
        plus_generators=tuple(plus_gens),
    )


# -- ready-made specs --------------------------------------------------------

def gpam_spec(alpha=Fraction(-9, 8), r=Fraction(2)) -> StructureSpec:
    """Generalised 2D parabolic Anderson model: scaling (2,1,1), beta = 2."""
    return StructureSpec(
        scaling=Scaling((2, 1, 1)),
        alpha=Fraction(alpha),
        beta=Fraction(2),
        r=Fraction(r),
        monomials=(
            Monomial(1, None, (0, 0, 0)),
            Monomial(0, None, (0, 1, 1)),
            Monomial(0, None, (0, 2, 0)),
            Monomial(0, None, (0, 0, 2)),
        ),
    )


def phi4_spec(alpha=Fraction(-63, 25), r=Fraction(2)) -> StructureSpec:
    """Dynamical Phi^4 in 3 space dimensions: scaling (2,1,1,1), beta = 2."""
    return StructureSpec(
        scaling=Scaling((2, 1, 1, 1)),
        alpha=Fraction(alpha),
        beta=Fraction(2),
        r=Fraction(r),
        monomials=(
            Monomial(1, 0, (0, 0, 0, 0)),
            Monomial(0, 3, (0, 0, 0, 0)),
        ),
    )
