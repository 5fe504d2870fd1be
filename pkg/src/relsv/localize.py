"""Fixed-locus Euler classes: per-piece contributions, the combined identity,
and the assembled equivariant Hurwitz class.

Each torus-fixed map in the simple locus decomposes into a contracted vertex
over 0, one cover component ("edge") per part of mu, and the flag nodes
joining them.  The inverse Euler class of the virtual normal bundle factors
as

    1/e(N) = (flag factors) / (base * vertex * product of edges)

and also has a closed form per regime; ``verify_identity`` checks the two
agree exactly in the truncated ring after Mumford reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .combi import (
    REGIME_01,
    REGIME_02,
    REGIME_GENERAL,
    SpinProfile,
    edge_root_degree,
    flag_divisible_count,
    pushforward_degree,
    spin_bundle_degree,
)
from .errors import RegimeError, StructuralError
from .ratcore import (
    CHERN,
    HODGE_TAG,
    PSI,
    ROOT_TAG,
    GradedClass,
    Laurent,
    Monomial,
    chern_polynomial,
    mumford_reduce,
    nonequivariant_limit,
    psi_symbol,
)


def _truncation(p: SpinProfile) -> int:
    return max(p.dimension, 0)


def _scalar_class(value: Laurent | Fraction | int, p: SpinProfile) -> GradedClass:
    return GradedClass.scalar(value, _truncation(p))


@lru_cache(maxsize=None)
def _psi_linear(i: int, mu_i: int, d: int) -> GradedClass:
    """1 - (mu_i / t) psi_i"""
    return GradedClass.one(d) + GradedClass.generator(
        psi_symbol(i), d, Laurent.of(-mu_i, -1)
    )


@lru_cache(maxsize=None)
def _psi_linear_inverse(i: int, mu_i: int, d: int) -> GradedClass:
    return _psi_linear(i, mu_i, d).inverse()


@lru_cache(maxsize=None)
def _psi_geometric_direct(i: int, mu_i: int, d: int) -> GradedClass:
    """sum_k (mu_i / t)^k psi_i^k, the truncated geometric expansion."""
    out = GradedClass.one(d)
    coeff = Laurent.one()
    for k in range(1, d + 1):
        coeff = coeff * Laurent.of(mu_i, -1)
        out = out + GradedClass(d, {((psi_symbol(i), k),): coeff})
    return out


@lru_cache(maxsize=None)
def _psi_inverse_block(mu: tuple[int, ...], d: int) -> GradedClass:
    """Product over parts of the ring inverses of the linear psi factors."""
    out = GradedClass.one(d)
    for i, mu_i in enumerate(mu, start=1):
        out = out * _psi_linear_inverse(i, mu_i, d)
    return out


@lru_cache(maxsize=None)
def _psi_geometric_block(mu: tuple[int, ...], d: int) -> GradedClass:
    out = GradedClass.one(d)
    for i, mu_i in enumerate(mu, start=1):
        out = out * _psi_geometric_direct(i, mu_i, d)
    return out


@lru_cache(maxsize=None)
def _hodge_inverse_pair(d: int) -> GradedClass:
    """Ring product of the inverses of the two Hodge series in the combination.

    The base carries the plain Hodge series and the vertex its reciprocal, so
    their ring inverses multiply back to 1; computing the product here (once
    per truncation) keeps the combination honest without repeating the work
    per profile.
    """
    plus = chern_polynomial(HODGE_TAG, "+", Laurent.t(-1), d)
    minus = chern_polynomial(HODGE_TAG, "-", Laurent.t(-1), d)
    return plus.inverse() * minus.inverse()


@lru_cache(maxsize=None)
def _root_minus_inverse(r: int, d: int) -> GradedClass:
    return chern_polynomial(ROOT_TAG, "-", Laurent.of(r, -1), d).inverse()


def _t_over_r(p: SpinProfile) -> Laurent:
    return Laurent.of(Fraction(1, p.r), 1)


def _sum_floors(p: SpinProfile) -> int:
    return sum(edge_root_degree(mu_i, p.r) for mu_i in p.mu)


# ---------------------------------------------------------------------------
# Individual contributions
# ---------------------------------------------------------------------------


def _base_factors(p: SpinProfile) -> list[GradedClass]:
    g, r, mu, l = p.g, p.r, p.mu, p.l
    if p.regime == REGIME_01:
        mu1 = mu[0]
        scalar = Laurent.of(Fraction(factorial(mu1), mu1 ** (mu1 - 1)), mu1 - 1)
        return [_scalar_class(scalar, p)]
    if p.regime == REGIME_02:
        mu1, mu2 = mu
        value = Fraction(1, r) * (mu1 + mu2)
        for mu_i in mu:
            value *= Fraction(factorial(mu_i), mu_i ** (mu_i + 1))
        return [_scalar_class(Laurent.of(value, mu1 + mu2), p)]
    scalar = Fraction(1, r**l)
    for mu_i in mu:
        scalar *= Fraction(factorial(mu_i), mu_i ** (mu_i + 1))
    d = _truncation(p)
    factors = [_scalar_class(Laurent.of(scalar, 1 - g + p.degree), p)]
    factors.extend(_psi_linear(i, mu[i - 1], d) for i in range(1, l + 1))
    # dividing by the Chern polynomial of the negated Hodge class is
    # multiplying by the plain series
    factors.append(chern_polynomial(HODGE_TAG, "+", Laurent.t(-1), d))
    return factors


def contrib_base(p: SpinProfile) -> GradedClass:
    """Euler class of the moving part pulled back from the coarse map theory."""
    return _product(_base_factors(p))


@lru_cache(maxsize=None)
def _vertex_series(r: int, d: int) -> GradedClass:
    return chern_polynomial(ROOT_TAG, "-", Laurent.of(r, -1), d) * chern_polynomial(
        HODGE_TAG, "-", Laurent.t(-1), d
    )


def contrib_vertex(p: SpinProfile) -> GradedClass:
    """Euler class of the moving part of the root-bundle complex on the vertex.

    The power of t/r is the rank difference of the root pushforward -- the
    root degree plus 1 - g -- shifted by one for every flag node where r
    divides mu_i.
    """
    if p.regime != REGIME_GENERAL:
        raise RegimeError("the vertex contribution exists only for 3g-3+l >= 0")
    exponent = spin_bundle_degree(p) + 1 - p.g + flag_divisible_count(p)
    scalar = _t_over_r(p) ** exponent * Laurent.t(-(p.g - 1 + p.l))
    return _vertex_series(p.r, _truncation(p)) * scalar


def _flag_scalar(p: SpinProfile) -> Laurent:
    if p.regime == REGIME_01:
        raise RegimeError("no flag node in the (0,1) regime")
    if p.regime == REGIME_02:
        if p.mu[0] % p.r == 0:
            return Laurent.of(Fraction(1, p.r))
        return Laurent.t(-1)
    return Laurent.t(-p.l) * _t_over_r(p) ** flag_divisible_count(p)


def contrib_flag(p: SpinProfile) -> GradedClass:
    """Combined flag-node contribution; errors in the (0,1) regime (no node)."""
    return _scalar_class(_flag_scalar(p), p)


def _edge_scalar(p: SpinProfile, i: int) -> Laurent:
    mu_i = p.mu[i - 1]
    if p.regime == REGIME_01:
        # On the single component the root and its r-th power have the degrees
        # of the (mu_1 - 1)-twisted bundles.  For r >= 2 this equals the
        # generic formula times t; at r = 1 only this form matches the
        # closed form below.
        lower = edge_root_degree(mu_i - 1, p.r) if mu_i > 1 else 0
        top = Laurent.of(Fraction(factorial(lower), mu_i**lower), lower)
        bottom = Laurent.of(Fraction(factorial(mu_i - 1), mu_i ** (mu_i - 1)), mu_i - 1)
        return top * bottom.inverse()
    fl = edge_root_degree(mu_i, p.r)
    top = Laurent.of(Fraction(factorial(fl), mu_i**fl), fl)
    bottom = Laurent.of(Fraction(factorial(mu_i), mu_i**mu_i), mu_i)
    return top * bottom.inverse()


def contrib_edge(p: SpinProfile, i: int) -> GradedClass:
    """Euler class of the moving part of the root complex on the i-th cover component."""
    if not 1 <= i <= p.l:
        raise ValueError(f"edge index {i} out of range 1..{p.l}")
    return _scalar_class(_edge_scalar(p, i), p)


def _edge_twist_scalar(p: SpinProfile) -> Laurent | None:
    """Extra scalar entering the combined product in the (0,1) regime.

    Without a flag node there is still an r-fold isotropy of the spin
    structure along the single edge; the closed form absorbs it as its
    overall 1/r.  The product of the stated base and edge classes alone
    would miss exactly this factor.
    """
    if p.regime == REGIME_01:
        return Laurent.of(Fraction(1, p.r))
    return None


# ---------------------------------------------------------------------------
# Closed form and the combining identity
# ---------------------------------------------------------------------------


def _part_weight(p: SpinProfile, mu_i: int) -> Fraction:
    fl = edge_root_degree(mu_i, p.r)
    return mu_i * Fraction(mu_i, p.r) ** fl / factorial(fl)


@lru_cache(maxsize=65536)
def inverse_euler_closed(p: SpinProfile) -> GradedClass:
    """Closed form of 1/e(N) per regime."""
    t_over_r = _t_over_r(p)
    if p.regime == REGIME_01:
        mu1 = p.mu[0]
        value = (
            Laurent.of(Fraction(1, p.r))
            * t_over_r ** (-p.m)
            * Laurent.of(_part_weight(p, mu1) / mu1**2)
        )
        return _scalar_class(value, p)
    if p.regime == REGIME_02:
        value = t_over_r ** (-p.m) * Laurent.of(
            _part_weight(p, p.mu[0]) * _part_weight(p, p.mu[1]) / sum(p.mu)
        )
        return _scalar_class(value, p)
    d = _truncation(p)
    scalar = Fraction(p.r) ** (p.l + 2 * p.g - 2)
    for mu_i in p.mu:
        scalar *= _part_weight(p, mu_i)
    return _product(
        [
            _scalar_class(Laurent.of(scalar) * t_over_r ** (p.dimension - p.m), p),
            chern_polynomial(ROOT_TAG, "+", Laurent.of(p.r, -1), d),
            _psi_geometric_block(p.mu, d),
        ]
    )


def scaled_presentation_inverse_euler(p: SpinProfile) -> GradedClass:
    """The same closed form written with t-free psi factors.

    The alternative presentation carries 1/(1 - (mu_i/r) psi_i) and assigns
    every formal class of degree k the weight (r/t)^k afterwards.  Both
    presentations must assemble to the identical class; this function exists
    so a test can prove that reconciliation rather than assume it.
    """
    if p.regime != REGIME_GENERAL:
        return inverse_euler_closed(p)
    d = _truncation(p)
    scalar = Fraction(p.r) ** (p.l + 2 * p.g - 2)
    for mu_i in p.mu:
        scalar *= _part_weight(p, mu_i)

    def psi_geometric_t_free(i: int) -> GradedClass:
        out = GradedClass.one(d)
        for k in range(1, d + 1):
            out = out + GradedClass(
                d, {((psi_symbol(i), k),): Laurent.of(Fraction(p.mu[i - 1], p.r) ** k)}
            )
        return out

    plain = _product(
        [
            GradedClass.scalar(Laurent.of(1), d),
            chern_polynomial(ROOT_TAG, "+", Laurent.of(Fraction(1)), d),
        ]
        + [psi_geometric_t_free(i) for i in range(1, p.l + 1)]
    )
    # weight every class of degree k by (r/t)^k, then restore the prefactor
    weighted: dict[Monomial, Laurent] = {}
    r_over_t = Laurent.of(p.r, -1)
    for mono, coeff in plain.terms.items():
        deg = sum(
            (1 if sym[0] == PSI else sym[2]) * exp for sym, exp in mono
        )
        weighted[mono] = coeff * r_over_t**deg
    prefactor = Laurent.of(scalar) * _t_over_r(p) ** (p.dimension - p.m)
    return GradedClass(d, weighted) * prefactor


@dataclass(frozen=True)
class ContributionReport:
    """All per-piece classes plus the two sides of the combining identity."""

    profile: SpinProfile
    base: GradedClass
    vertex: GradedClass | None
    flag: GradedClass | None
    edges: tuple[GradedClass, ...]
    edge_twist: GradedClass | None
    combined_from_lemmas: GradedClass
    closed_form: GradedClass
    identity_holds: bool

    def to_json_obj(self) -> dict:
        def cls(x):
            return None if x is None else x.to_json_obj()

        return {
            "profile": self.profile.to_json_obj(),
            "base": cls(self.base),
            "vertex": cls(self.vertex),
            "flag": cls(self.flag),
            "edges": [cls(e) for e in self.edges],
            "edge_twist": cls(self.edge_twist),
            "combined_from_lemmas": cls(self.combined_from_lemmas),
            "closed_form": cls(self.closed_form),
            "identity_holds": self.identity_holds,
        }


def _product(classes: list[GradedClass]) -> GradedClass:
    if not classes:
        raise ValueError("empty product")
    # multiply small operands first; mutually inverse series then collapse early
    pending = sorted(classes, key=lambda c: len(c.terms))
    out = pending[0]
    for other in pending[1:]:
        out = out * other
    return out


def _combined_from_lemmas(p: SpinProfile) -> GradedClass:
    """flag / (base * vertex * product of edges) via per-factor ring inverses.

    Every series inverse is computed once by the generic geometric inversion
    and memoized; the scalar Laurent pieces are merged before touching any
    class product, which keeps the grid sweep fast without assuming any
    algebraic identity beyond what the ring operations provide.
    """
    d = _truncation(p)
    scalar = Laurent.one()
    for i in range(1, p.l + 1):
        scalar = scalar * _edge_scalar(p, i).inverse()
    if p.regime != REGIME_01:
        scalar = scalar * _flag_scalar(p)
    twist = _edge_twist_scalar(p)
    if twist is not None:
        scalar = scalar * twist

    if p.regime == REGIME_01:
        mu1 = p.mu[0]
        base = Laurent.of(Fraction(factorial(mu1), mu1 ** (mu1 - 1)), mu1 - 1)
        return _scalar_class(scalar * base.inverse(), p)
    if p.regime == REGIME_02:
        mu1, mu2 = p.mu
        base = Fraction(mu1 + mu2, p.r)
        for mu_i in p.mu:
            base *= Fraction(factorial(mu_i), mu_i ** (mu_i + 1))
        return _scalar_class(scalar * Laurent.of(base, mu1 + mu2).inverse(), p)

    base_scalar = Fraction(1, p.r**p.l)
    for mu_i in p.mu:
        base_scalar *= Fraction(factorial(mu_i), mu_i ** (mu_i + 1))
    scalar = scalar * Laurent.of(base_scalar, 1 - p.g + p.degree).inverse()
    exponent = spin_bundle_degree(p) + 1 - p.g + flag_divisible_count(p)
    vertex_scalar = _t_over_r(p) ** exponent * Laurent.t(-(p.g - 1 + p.l))
    scalar = scalar * vertex_scalar.inverse()
    return _product(
        [
            _scalar_class(scalar, p),
            _psi_inverse_block(p.mu, d),
            _root_minus_inverse(p.r, d),
            _hodge_inverse_pair(d),
        ]
    )


def check_identity(p: SpinProfile, mutation: bool = False) -> bool:
    """Boolean form of ``verify_identity`` without the per-piece report classes."""
    combined = _combined_from_lemmas(p)
    if mutation:
        combined = combined * Laurent.t(1)
    return mumford_reduce(combined) == mumford_reduce(inverse_euler_closed(p))


def verify_identity(p: SpinProfile, mutation: bool = False) -> ContributionReport:
    """Build both sides of the combining identity and compare exactly.

    ``mutation`` perturbs one exponent on the combined side; it exists so
    that tests can demonstrate the checker rejects wrong algebra.
    """
    combined = _combined_from_lemmas(p)
    if mutation:
        combined = combined * Laurent.t(1)

    closed = inverse_euler_closed(p)
    combined_reduced = mumford_reduce(combined)
    closed_reduced = mumford_reduce(closed)

    twist = _edge_twist_scalar(p)
    return ContributionReport(
        profile=p,
        base=contrib_base(p),
        vertex=contrib_vertex(p) if p.regime == REGIME_GENERAL else None,
        flag=contrib_flag(p) if p.regime != REGIME_01 else None,
        edges=tuple(contrib_edge(p, i) for i in range(1, p.l + 1)),
        edge_twist=_scalar_class(twist, p) if twist is not None else None,
        combined_from_lemmas=combined_reduced,
        closed_form=closed_reduced,
        identity_holds=(combined_reduced == closed_reduced),
    )


# ---------------------------------------------------------------------------
# The assembled Hurwitz class
# ---------------------------------------------------------------------------


def hurwitz_class(p: SpinProfile) -> GradedClass:
    """m! t^m / e(N) times the stack degree onto the spin moduli.

    In the (0,1) and (0,2) regimes the result is a pure rational number; in
    the general regime it is the integrand class over the spin moduli, with
    the t^0 layer carrying exactly the top-degree monomials.
    """
    weight = Laurent.of(factorial(p.m), p.m) * Laurent.of(pushforward_degree(p))
    return inverse_euler_closed(p) * weight


def hurwitz_scalar(p: SpinProfile) -> Fraction:
    """The Hurwitz number in the degenerate regimes, as an exact rational."""
    if p.regime == REGIME_GENERAL:
        raise RegimeError("general-regime classes need an intersection table")
    return nonequivariant_limit(hurwitz_class(p)).constant_rational()


def class_to_table_entries(x: GradedClass, l: int) -> dict[tuple[tuple[int, ...], int], Fraction]:
    """Decompose a t^0 class into (psi-exponent vector, Chern degree) pairs."""
    out: dict[tuple[tuple[int, ...], int], Fraction] = {}
    for mono, coeff in x.terms.items():
        b = [0] * l
        k = 0
        for sym, exp in mono:
            if sym[0] == PSI:
                b[sym[1] - 1] = exp
            elif sym[0] == CHERN and sym[1] == ROOT_TAG:
                if exp != 1 or k:
                    raise StructuralError(f"monomial {mono} is not table-shaped")
                k = sym[2]
            else:
                raise StructuralError(f"unexpected symbol {sym} in integrand")
        value = coeff.coeff(0)
        if value:
            out[(tuple(b), k)] = out.get((tuple(b), k), Fraction(0)) + value
    return out


def integrate_with_table(p: SpinProfile, table) -> Fraction:
    """Contract the assembled class against intersection numbers.

    ``table`` must provide ``as_dict()`` mapping (psi exponents, Chern
    degree) to exact rationals, as produced by the solve backend.
    """
    if p.regime != REGIME_GENERAL:
        return hurwitz_scalar(p)
    integrand = nonequivariant_limit(hurwitz_class(p))
    values = table.as_dict()
    total = Fraction(0)
    for key, coeff in class_to_table_entries(integrand, p.l).items():
        if key not in values:
            raise StructuralError(f"intersection table missing entry {key}")
        total += coeff * values[key]
    return total
