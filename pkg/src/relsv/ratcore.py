"""Exact scalars, Laurent polynomials in the torus weight, and a truncated graded ring.

Three nested coefficient structures carry every computation in this package:

* exact rationals (``fractions.Fraction``) -- no floating point anywhere;
* Laurent polynomials in the equivariant weight ``t`` over the rationals;
* a total-degree-truncated commutative polynomial ring over those Laurent
  scalars, generated by cotangent-line classes ``psi_i`` and by Chern
  classes of tagged K-theory classes.

Values of all three kinds are immutable after construction and all
operations are pure, so they can be shared freely between workers.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

from .errors import LimitDoesNotExistError, StructuralError, UnsupportedParameterError

ExactScalar = Fraction

ScalarLike = Union[int, Fraction, "Laurent"]

# Tags for the two K-theory classes whose Chern classes appear in the engine.
ROOT_TAG = "-RrhoL"        # minus the derived pushforward of the universal r-th root
HODGE_TAG = "rho*omega"    # pushforward of the relative dualizing sheaf


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"not an exact scalar: {value!r}")


class Laurent:
    """Laurent polynomial in t with Fraction coefficients; exponents may be negative."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, Fraction] | None = None):
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                v = _as_fraction(v)
                if v:
                    c[int(e)] = v
        self._c = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def of(cls, value, exp: int = 0) -> "Laurent":
        """value * t**exp"""
        return cls({exp: _as_fraction(value)})

    @classmethod
    def zero(cls) -> "Laurent":
        return cls()

    @classmethod
    def one(cls) -> "Laurent":
        return cls({0: Fraction(1)})

    @classmethod
    def t(cls, exp: int = 1) -> "Laurent":
        return cls({exp: Fraction(1)})

    # -- inspection --------------------------------------------------------

    def items(self) -> list[tuple[int, Fraction]]:
        return sorted(self._c.items())

    def coeff(self, exp: int) -> Fraction:
        return self._c.get(exp, Fraction(0))

    def is_zero(self) -> bool:
        return not self._c

    def is_monomial(self) -> bool:
        return len(self._c) == 1

    def monomial(self) -> tuple[int, Fraction]:
        """(exponent, coefficient) of a one-term Laurent polynomial."""
        if len(self._c) != 1:
            raise UnsupportedParameterError(f"not a t-monomial: {self!r}")
        [(e, v)] = self._c.items()
        return e, v

    def min_exponent(self) -> int:
        if not self._c:
            raise ValueError("zero has no exponents")
        return min(self._c)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "Laurent":
        other = _as_laurent(other)
        c = dict(self._c)
        for e, v in other._c.items():
            w = c.get(e, Fraction(0)) + v
            if w:
                c[e] = w
            else:
                c.pop(e, None)
        out = Laurent.__new__(Laurent)
        out._c = c
        return out

    __radd__ = __add__

    def __neg__(self) -> "Laurent":
        out = Laurent.__new__(Laurent)
        out._c = {e: -v for e, v in self._c.items()}
        return out

    def __sub__(self, other) -> "Laurent":
        return self + (-_as_laurent(other))

    def __rsub__(self, other) -> "Laurent":
        return _as_laurent(other) + (-self)

    def __mul__(self, other) -> "Laurent":
        other = _as_laurent(other)
        c: dict[int, Fraction] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = e1 + e2
                w = c.get(e, Fraction(0)) + v1 * v2
                if w:
                    c[e] = w
                else:
                    c.pop(e, None)
        out = Laurent.__new__(Laurent)
        out._c = c
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Laurent":
        if n < 0:
            e, v = self.monomial()  # negative powers only of t-monomials
            return Laurent({e * n: v**n})
        out = Laurent.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "Laurent":
        e, v = self.monomial()
        return Laurent({-e: 1 / v})

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Laurent.of(other)
        if not isinstance(other, Laurent):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __bool__(self) -> bool:
        return bool(self._c)

    def __repr__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for e, v in self.items():
            if e == 0:
                parts.append(f"{v}")
            elif e == 1:
                parts.append(f"{v}*t")
            else:
                parts.append(f"{v}*t^{e}")
        return " + ".join(parts)


def _as_laurent(value) -> Laurent:
    if isinstance(value, Laurent):
        return value
    return Laurent.of(_as_fraction(value))


# ---------------------------------------------------------------------------
# Formal class symbols and monomials
# ---------------------------------------------------------------------------

# A symbol is a small tuple:
#   ("psi", i)        cotangent-line class at the i-th marked point, degree 1
#   ("c", tag, k)     k-th Chern class of the class named by tag, degree k
#   ("cd", tag, k)    k-th Chern class of the dual, degree k (reduced away
#                     by mumford_reduce)
Symbol = tuple

PSI = "psi"
CHERN = "c"
CHERN_DUAL = "cd"


def psi_symbol(i: int) -> Symbol:
    return (PSI, i)


def chern_symbol(tag: str, k: int) -> Symbol:
    return (CHERN, tag, k)


def chern_dual_symbol(tag: str, k: int) -> Symbol:
    return (CHERN_DUAL, tag, k)


def symbol_degree(sym: Symbol) -> int:
    return 1 if sym[0] == PSI else sym[2]


def symbol_name(sym: Symbol) -> str:
    if sym[0] == PSI:
        return f"psi{sym[1]}"
    if sym[0] == CHERN:
        return f"c{sym[2]}({sym[1]})"
    return f"c{sym[2]}({sym[1]}^)"


# A monomial is a tuple of (symbol, exponent) pairs sorted by symbol.
Monomial = tuple

ONE_MONO: Monomial = ()


@lru_cache(maxsize=None)
def monomial_degree(mono: Monomial) -> int:
    return sum(symbol_degree(s) * e for s, e in mono)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return tuple(sorted(d.items()))


class GradedClass:
    """Element of the commutative ring on formal classes, truncated in total degree.

    ``terms`` maps monomials to Laurent coefficients; monomials of degree
    above ``truncation`` are discarded by every operation, and zero
    coefficients are never stored.
    """

    __slots__ = ("truncation", "terms")

    def __init__(self, truncation: int, terms: Mapping[Monomial, Laurent] | None = None):
        if truncation < 0:
            raise StructuralError("truncation must be non-negative")
        self.truncation = truncation
        tt: dict[Monomial, Laurent] = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = _as_laurent(coeff)
                if not coeff.is_zero() and monomial_degree(mono) <= truncation:
                    tt[mono] = coeff
        self.terms = tt

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, truncation: int) -> "GradedClass":
        return cls(truncation)

    @classmethod
    def one(cls, truncation: int) -> "GradedClass":
        return cls(truncation, {ONE_MONO: Laurent.one()})

    @classmethod
    def scalar(cls, value: ScalarLike, truncation: int) -> "GradedClass":
        return cls(truncation, {ONE_MONO: _as_laurent(value)})

    @classmethod
    def generator(cls, sym: Symbol, truncation: int, coeff: ScalarLike = 1) -> "GradedClass":
        return cls(truncation, {((sym, 1),): _as_laurent(coeff)})

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return not self.terms or set(self.terms) == {ONE_MONO}

    def scalar_part(self) -> Laurent:
        return self.terms.get(ONE_MONO, Laurent.zero())

    def constant_rational(self) -> Fraction:
        """The t^0 rational of a pure-scalar class (checks purity)."""
        if not self.is_scalar():
            raise StructuralError("class has formal-class terms")
        s = self.scalar_part()
        for e, _ in s.items():
            if e != 0:
                raise StructuralError("scalar still carries powers of t")
        return s.coeff(0)

    def sorted_terms(self) -> list[tuple[Monomial, Laurent]]:
        return sorted(self.terms.items(), key=lambda kv: (monomial_degree(kv[0]), kv[0]))

    def degree_layer(self, k: int) -> "GradedClass":
        return GradedClass(
            self.truncation,
            {m: c for m, c in self.terms.items() if monomial_degree(m) == k},
        )

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "GradedClass"):
        if self.truncation != other.truncation:
            raise StructuralError(
                f"mismatched truncation: {self.truncation} vs {other.truncation}"
            )

    def __add__(self, other: "GradedClass") -> "GradedClass":
        self._check(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            s = terms.get(mono)
            s = coeff if s is None else s + coeff
            if s.is_zero():
                terms.pop(mono, None)
            else:
                terms[mono] = s
        out = GradedClass.__new__(GradedClass)
        out.truncation = self.truncation
        out.terms = terms
        return out

    def __neg__(self) -> "GradedClass":
        out = GradedClass.__new__(GradedClass)
        out.truncation = self.truncation
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other: "GradedClass") -> "GradedClass":
        return self + (-other)

    def __mul__(self, other) -> "GradedClass":
        if isinstance(other, (int, Fraction, Laurent)):
            other = _as_laurent(other)
            if other.is_zero():
                return GradedClass.zero(self.truncation)
            out = GradedClass.__new__(GradedClass)
            out.truncation = self.truncation
            out.terms = {m: c * other for m, c in self.terms.items()}
            return out
        self._check(other)
        d = self.truncation
        terms: dict[Monomial, Laurent] = {}
        # iterate over the smaller operand's terms in the outer loop
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        bl = [(m2, monomial_degree(m2), c2) for m2, c2 in b.items()]
        for m1, c1 in a.items():
            d1 = monomial_degree(m1)
            for m2, d2, c2 in bl:
                if d1 + d2 > d:
                    continue
                m = _mono_mul(m1, m2)
                c = c1 * c2
                s = terms.get(m)
                s = c if s is None else s + c
                if s.is_zero():
                    terms.pop(m, None)
                else:
                    terms[m] = s
        out = GradedClass.__new__(GradedClass)
        out.truncation = d
        out.terms = terms
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "GradedClass":
        if n < 0:
            return self.inverse() ** (-n)
        out = GradedClass.one(self.truncation)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "GradedClass":
        """Multiplicative inverse; the scalar part must be an invertible t-monomial.

        Splitting x = s(1 - u) with u of positive class degree, the inverse is
        s^-1 (1 + u + u^2 + ...), which terminates at the truncation degree.
        """
        s = self.scalar_part()
        s_inv = s.inverse()  # raises if not a monomial
        u = GradedClass.one(self.truncation) - self * s_inv
        out = GradedClass.one(self.truncation)
        acc = GradedClass.one(self.truncation)
        for _ in range(self.truncation):
            acc = acc * u
            if acc.is_zero():
                break
            out = out + acc
        return out * s_inv

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedClass):
            return NotImplemented
        return self.truncation == other.truncation and self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for mono, coeff in self.sorted_terms():
            name = "*".join(
                symbol_name(s) + (f"^{e}" if e > 1 else "") for s, e in mono
            ) or "1"
            bits.append(f"({coeff!r})*{name}")
        return " + ".join(bits)

    # -- structural operations ----------------------------------------------

    def substitute_tag(self, tag: str, layers: Mapping[int, "GradedClass"]) -> "GradedClass":
        """Replace every generator c_k(tag) by layers[k]; duals get (-1)^k layers[k]."""
        out = GradedClass.zero(self.truncation)
        for mono, coeff in self.terms.items():
            piece = GradedClass.scalar(coeff, self.truncation)
            for sym, exp in mono:
                if sym[0] in (CHERN, CHERN_DUAL) and sym[1] == tag:
                    k = sym[2]
                    repl = layers.get(k)
                    if repl is None:
                        raise StructuralError(f"no substitution layer for degree {k}")
                    if sym[0] == CHERN_DUAL and k % 2:
                        repl = -repl
                    piece = piece * repl**exp
                else:
                    piece = piece * GradedClass.generator(sym, self.truncation) ** exp
            out = out + piece
        return out

    def to_json_obj(self) -> list[dict]:
        """Flat list of terms; one entry per (monomial, t-exponent) pair."""
        rows = []
        for mono, coeff in self.sorted_terms():
            names = []
            for sym, exp in mono:
                names.extend([symbol_name(sym)] * exp)
            for t_exp, value in coeff.items():
                rows.append(
                    {"monomial": names, "coeff": {"t_exp": t_exp, "value": str(value)}}
                )
        return rows


# ---------------------------------------------------------------------------
# Ring-level operations
# ---------------------------------------------------------------------------


def add(a: GradedClass, b: GradedClass) -> GradedClass:
    return a + b


def mul(a: GradedClass, b: GradedClass) -> GradedClass:
    return a * b


@lru_cache(maxsize=None)
def chern_polynomial(tag: str, sign: str, parameter: ScalarLike, truncation: int) -> GradedClass:
    """Chern polynomial c_s(E) = sum_k c_k(E) s^k of the class tagged ``tag``.

    ``sign`` "+" gives the series itself with s = parameter; "-" gives its
    multiplicative inverse (the Chern polynomial of the negated K-theory
    class), expanded as a geometric series and truncated.  The parameter
    must be a single Laurent monomial so the inversion stays in the ring.
    Results are cached; classes are immutable by convention.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    s = _as_laurent(parameter)
    if not s.is_monomial():
        raise UnsupportedParameterError(f"Chern parameter must be a t-monomial: {s!r}")
    series = GradedClass.one(truncation)
    power = Laurent.one()
    for k in range(1, truncation + 1):
        power = power * s
        series = series + GradedClass.generator(chern_symbol(tag, k), truncation, power)
    if sign == "+":
        return series
    return series.inverse()


@lru_cache(maxsize=None)
def _even_hodge_rewrite(k: int, truncation: int) -> GradedClass:
    # c_{2j} of the Hodge-type class in terms of lower Chern classes, from the
    # layer-by-layer expansion of c(E) c(E^dual) = 1:
    #   2 c_n = sum_{j=1..n-1} (-1)^{j+1} c_{n-j} c_j   (n even)
    assert k % 2 == 0 and k >= 2
    out = GradedClass.zero(truncation)
    for j in range(1, k):
        term = GradedClass.generator(chern_symbol(HODGE_TAG, k - j), truncation) * GradedClass.generator(
            chern_symbol(HODGE_TAG, j), truncation
        )
        out = out + (term if j % 2 else -term)
    return out * Fraction(1, 2)


def mumford_reduce(x: GradedClass) -> GradedClass:
    """Normalize Hodge-type Chern classes.

    Dual generators are rewritten through c_k(E^dual) = (-1)^k c_k(E), and the
    even-degree generators of the Hodge tag are eliminated using the relations
    that make c(E) c(E^dual) = 1 hold degree by degree.  Idempotent.
    """
    d = x.truncation
    involved = any(
        sym[0] == CHERN_DUAL
        or (sym[0] == CHERN and sym[1] == HODGE_TAG and sym[2] % 2 == 0)
        for mono in x.terms
        for sym, _ in mono
    )
    if not involved:
        return x
    out = GradedClass.zero(d)
    for mono, coeff in x.terms.items():
        piece = GradedClass.scalar(coeff, d)
        for sym, exp in mono:
            if sym[0] == CHERN_DUAL and sym[1] == HODGE_TAG:
                g = GradedClass.generator(chern_symbol(HODGE_TAG, sym[2]), d)
                if sym[2] % 2:
                    g = -g
                piece = piece * g**exp
            elif sym[0] == CHERN_DUAL:
                # dual of a non-Hodge tag: only the sign rule applies
                g = GradedClass.generator(chern_symbol(sym[1], sym[2]), d)
                if sym[2] % 2:
                    g = -g
                piece = piece * g**exp
            else:
                piece = piece * GradedClass.generator(sym, d) ** exp
        out = out + piece

    # eliminate even Hodge generators, highest degree first
    for k in range(d - d % 2, 1, -2):
        sym = chern_symbol(HODGE_TAG, k)
        repl = None
        while any(sym in dict(mono) for mono in out.terms):
            if repl is None:
                repl = _even_hodge_rewrite(k, d)
            new = GradedClass.zero(d)
            for mono, coeff in out.terms.items():
                md = dict(mono)
                if sym not in md:
                    new = new + GradedClass(d, {mono: coeff})
                    continue
                exp = md.pop(sym)
                rest = tuple(sorted(md.items()))
                new = new + GradedClass(d, {rest: coeff}) * repl**exp
            out = new
    return out


def nonequivariant_limit(x: GradedClass) -> GradedClass:
    """Drop positive powers of t and keep the t^0 layer.

    Raises if any term carries a negative power of t, since then no limit
    exists and upstream bookkeeping is wrong.
    """
    terms: dict[Monomial, Laurent] = {}
    for mono, coeff in x.terms.items():
        for t_exp, value in coeff.items():
            if t_exp < 0:
                raise LimitDoesNotExistError(
                    f"term {mono} carries t^{t_exp}; no non-equivariant limit"
                )
        v = coeff.coeff(0)
        if v:
            terms[mono] = Laurent.of(v)
    return GradedClass(x.truncation, terms)
