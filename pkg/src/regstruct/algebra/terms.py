"""Canonical terms of the graded symbol algebra and exact linear combinations.

Symbols are built from the unit 1, the noise symbol Xi, monomials X^k,
integrations I_k(tau) and products, kept in a canonical normal form so
that equality is structural equality.  Homogeneities are affine functions
c0 + c1*alpha with exact rational c0.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

Multiindex = tuple[int, ...]


# ---------------------------------------------------------------------------
# multiindex helpers

def mi_zero(d: int) -> Multiindex:
    return (0,) * d


def mi_unit(d: int, i: int) -> Multiindex:
    return tuple(1 if j == i else 0 for j in range(d))


def mi_add(a: Multiindex, b: Multiindex) -> Multiindex:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def mi_sub(a: Multiindex, b: Multiindex) -> Multiindex:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def mi_leq(a: Multiindex, b: Multiindex) -> bool:
    return all(x <= y for x, y in zip(a, b, strict=True))


def mi_factorial(k: Multiindex) -> int:
    out = 1
    for x in k:
        out *= math.factorial(x)
    return out


def mi_binom(k: Multiindex, ell: Multiindex) -> int:
    out = 1
    for a, b in zip(k, ell, strict=True):
        out *= math.comb(a, b)
    return out


def mi_range(k: Multiindex):
    """All multiindices ell with ell <= k componentwise."""
    return itertools.product(*(range(x + 1) for x in k))


@dataclass(frozen=True)
class Scaling:
    """Integer scaling weights s_1..s_d (time-like coordinates count higher)."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        if not self.exponents or any(s < 1 for s in self.exponents):
            raise ValueError("scaling exponents must be positive integers")
        if reduce(math.gcd, self.exponents) != 1:
            raise ValueError("scaling exponents must be relatively prime")

    @property
    def dim(self) -> int:
        return len(self.exponents)

    @property
    def total(self) -> int:
        return sum(self.exponents)

    def degree(self, k: Multiindex) -> int:
        """Scaled degree |k|_s."""
        return sum(s * x for s, x in zip(self.exponents, k, strict=True))

    def iter_degree_below(self, bound):
        """All multiindices k with |k|_s < bound (bound a rational/float)."""
        d = self.dim

        def rec(i, remaining):
            if i == d:
                yield ()
                return
            s = self.exponents[i]
            n = 0
            while n * s < remaining:
                for rest in rec(i + 1, remaining - n * s):
                    yield (n,) + rest
                n += 1

        yield from rec(0, bound)


# ---------------------------------------------------------------------------
# homogeneities

@dataclass(frozen=True)
class Hom:
    """Affine homogeneity c0 + c1*alpha with exact rational c0."""

    c0: Fraction
    c1: int = 0

    def __add__(self, other: "Hom") -> "Hom":
        return Hom(self.c0 + other.c0, self.c1 + other.c1)

    def __sub__(self, other: "Hom") -> "Hom":
        return Hom(self.c0 - other.c0, self.c1 - other.c1)

    def shift(self, c: Fraction) -> "Hom":
        return Hom(self.c0 + c, self.c1)

    def eval(self, alpha: Fraction) -> Fraction:
        return self.c0 + self.c1 * alpha

    def __repr__(self):
        if self.c1 == 0:
            return f"{self.c0}"
        return f"{self.c0}{self.c1:+d}a"


HOM_ZERO = Hom(Fraction(0), 0)


# ---------------------------------------------------------------------------
# formal expressions

_TAG = {"one": 0, "xi": 1, "x": 2, "i": 3, "prod": 4}

_HASH_COUNTER = itertools.count(1)


def _next_hash() -> int:
    # interned terms get distinct well-mixed hashes, cheaper than tree hashing
    return (next(_HASH_COUNTER) * 0x9E3779B1) & 0x7FFFFFFF


@dataclass(frozen=True, eq=False)
class Expr:
    """Canonical formal expression (hash-consed: equality is identity).

    kind is one of 'one', 'xi', 'x' (monomial X^k), 'i' (I_k applied to sub)
    and 'prod' (sorted multiset of non-product factors).  Instances are
    interned by the constructors ONE/XI/X/I/prod, so structural equality
    coincides with object identity and hashing is O(1).
    """

    kind: str
    k: Multiindex = ()
    sub: "Expr | None" = None
    factors: tuple["Expr", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_h", _next_hash())

    def __hash__(self):
        return self._h

    def sort_key(self):
        cached = _SORT_KEYS.get(self)
        if cached is None:
            cached = (
                _TAG[self.kind],
                self.k,
                self.sub.sort_key() if self.sub is not None else (),
                tuple(f.sort_key() for f in self.factors),
            )
            _SORT_KEYS[self] = cached
        return cached

    def __lt__(self, other: "Expr"):
        return self.sort_key() < other.sort_key()

    @property
    def is_poly(self) -> bool:
        return self.kind in ("one", "x")

    def __repr__(self):
        return render(self)


_SORT_KEYS: dict["Expr", tuple] = {}
_X_CACHE: dict[Multiindex, "Expr"] = {}
_I_CACHE: dict[tuple, "Expr"] = {}
_PROD_CACHE: dict[tuple, "Expr"] = {}

ONE = Expr("one")
XI = Expr("xi")


def X(k: Multiindex) -> Expr:
    """Polynomial symbol X^k (the unit for k = 0)."""
    k = tuple(k)
    if all(x == 0 for x in k):
        return ONE
    out = _X_CACHE.get(k)
    if out is None:
        out = _X_CACHE[k] = Expr("x", k=k)
    return out


def I(k: Multiindex, tau: Expr) -> Expr:
    """Integration symbol I_k(tau); never applied to polynomials."""
    if tau.is_poly:
        raise ValueError("I_k is not applied to polynomial symbols")
    key = (tuple(k), tau)
    out = _I_CACHE.get(key)
    if out is None:
        out = _I_CACHE[key] = Expr("i", k=tuple(k), sub=tau)
    return out


def prod(factors) -> Expr:
    """Canonical product: flatten, drop units, merge monomials, sort."""
    flat: list[Expr] = []
    poly_k: Multiindex | None = None
    for f in factors:
        items = f.factors if f.kind == "prod" else (f,)
        for g in items:
            if g.kind == "one":
                continue
            if g.kind == "x":
                poly_k = g.k if poly_k is None else mi_add(poly_k, g.k)
            else:
                flat.append(g)
    if poly_k is not None:
        mono = X(poly_k)
        if mono is not ONE:
            flat.append(mono)
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=Expr.sort_key)
    key = tuple(flat)
    out = _PROD_CACHE.get(key)
    if out is None:
        out = _PROD_CACHE[key] = Expr("prod", factors=key)
    return out


def expr_factors(tau: Expr) -> tuple[Expr, ...]:
    return tau.factors if tau.kind == "prod" else (tau,)


def subexpressions(tau: Expr) -> set[Expr]:
    """All subexpressions (factors and integrands, recursively), incl. tau."""
    out = {tau}
    if tau.kind == "prod":
        for f in tau.factors:
            out |= subexpressions(f)
    elif tau.kind == "i":
        out |= subexpressions(tau.sub)
    return out


def noise_count(tau: Expr) -> int:
    """Number of occurrences of the noise symbol Xi in tau."""
    if tau.kind == "xi":
        return 1
    if tau.kind == "i":
        return noise_count(tau.sub)
    if tau.kind == "prod":
        return sum(noise_count(f) for f in tau.factors)
    return 0


def render(tau: Expr) -> str:
    if tau.kind == "one":
        return "1"
    if tau.kind == "xi":
        return "Xi"
    if tau.kind == "x":
        return _render_x(tau.k)
    if tau.kind == "i":
        return f"{_render_op('I', tau.k)}({render(tau.sub)})"
    return "*".join(render(f) for f in tau.factors)


def _render_x(k: Multiindex) -> str:
    if sum(k) == 1:
        return f"X{k.index(1) + 1}"
    return "X^(" + ",".join(map(str, k)) + ")"


def _render_op(name: str, k: Multiindex) -> str:
    if all(x == 0 for x in k):
        return name
    if sum(k) == 1:
        return f"{name}{k.index(1) + 1}"
    return f"{name}^(" + ",".join(map(str, k)) + ")"


# ---------------------------------------------------------------------------
# positive-algebra expressions

@dataclass(frozen=True, eq=False)
class PExpr:
    """Element X^k * prod_j J_{k_j}(tau_j) of the positive algebra.

    Interned by p_one/p_x/p_j/p_mul, so equality is identity.
    """

    k: Multiindex
    js: tuple[tuple[Multiindex, Expr], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_h", _next_hash())

    def __hash__(self):
        return self._h

    def sort_key(self):
        return (self.k, tuple((kj, t.sort_key()) for kj, t in self.js))

    def __lt__(self, other: "PExpr"):
        return self.sort_key() < other.sort_key()

    @property
    def is_unit(self) -> bool:
        return not self.js and all(x == 0 for x in self.k)

    def __repr__(self):
        if self.is_unit:
            return "1"
        parts = []
        if any(self.k):
            parts.append(_render_x(self.k))
        parts.extend(f"{_render_op('J', kj)}({render(t)})" for kj, t in self.js)
        return "*".join(parts)


_P_CACHE: dict[tuple, PExpr] = {}
_JS_KEYS: dict[PExpr, tuple] = {}


def _p_intern(k: Multiindex, js: tuple) -> PExpr:
    key = (k, js)
    out = _P_CACHE.get(key)
    if out is None:
        out = _P_CACHE[key] = PExpr(k, js)
        _JS_KEYS[out] = tuple((kj, t.sort_key()) for kj, t in js)
    return out


def p_one(d: int) -> PExpr:
    return _p_intern(mi_zero(d), ())


def p_x(k: Multiindex) -> PExpr:
    return _p_intern(tuple(k), ())


def p_j(k: Multiindex, tau: Expr, d: int) -> PExpr:
    return _p_intern(mi_zero(d), ((tuple(k), tau),))


_P_MUL_CACHE: dict[tuple[PExpr, PExpr], PExpr] = {}


def p_mul(a: PExpr, b: PExpr) -> PExpr:
    key = (a, b)
    out = _P_MUL_CACHE.get(key)
    if out is None:
        if not a.js:
            out = _p_intern(mi_add(a.k, b.k), b.js)
        elif not b.js:
            out = _p_intern(mi_add(a.k, b.k), a.js)
        else:
            # both factor lists are sorted: merge with precomputed keys
            ka, kb = _JS_KEYS[a], _JS_KEYS[b]
            ja, jb = a.js, b.js
            i = j = 0
            js = []
            while i < len(ja) and j < len(jb):
                if ka[i] <= kb[j]:
                    js.append(ja[i])
                    i += 1
                else:
                    js.append(jb[j])
                    j += 1
            js.extend(ja[i:])
            js.extend(jb[j:])
            out = _p_intern(mi_add(a.k, b.k), tuple(js))
        _P_MUL_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# linear combinations with exact rational coefficients

class Combo(dict):
    """Finite linear combination {basis element: Fraction}, no stored zeros."""

    @staticmethod
    def of(key, coeff=1) -> "Combo":
        c = Combo()
        c.add(key, coeff)
        return c

    def add(self, key, coeff) -> None:
        new = self.get(key, 0) + coeff
        if new == 0:
            self.pop(key, None)
        else:
            self[key] = new

    def add_combo(self, other: "Combo", scale=1) -> None:
        for key, coeff in other.items():
            self.add(key, coeff * scale)

    def scaled(self, scale) -> "Combo":
        out = Combo()
        out.add_combo(self, scale)
        return out

    def __repr__(self):
        if not self:
            return "0"
        return " + ".join(f"{c}*{k}" for k, c in sorted(self.items(), key=lambda kv: str(kv[0])))


def combo_apply(combo: Combo, fn) -> Combo:
    """Apply a linear map given elementwise (key -> Combo) to a Combo."""
    out = Combo()
    for key, coeff in combo.items():
        out.add_combo(fn(key), coeff)
    return out
