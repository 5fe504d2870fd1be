"""Spin profiles: validation and the integer bookkeeping derived from (g, r, mu).

A profile fixes a genus g, a divisibility order r and an ordered partition mu
of ramification orders over infinity.  Everything else the engine needs --
the number m of interior branch points, the reverse remainders, root-bundle
degrees, fixed-locus labels and stack degrees -- is derived here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .errors import InternalConsistencyError

REGIME_01 = "01"
REGIME_02 = "02"
REGIME_GENERAL = "general"


def check_ordered_partition(mu) -> tuple[int, ...]:
    """Validate and freeze an ordered partition (parts >= 1, length >= 1)."""
    parts = tuple(int(x) for x in mu)
    if len(parts) < 1:
        raise ValueError("ordered partition must have at least one part")
    if any(p < 1 for p in parts):
        raise ValueError(f"partition parts must be positive: {parts}")
    return parts


def remainder(a: int, r: int) -> int:
    """<a/r>, the remainder with a = floor(a/r)*r + <a/r>."""
    if a < 0 or r < 1:
        raise ValueError("remainder requires a >= 0 and r >= 1")
    return a % r


@dataclass(frozen=True)
class EmptySpace:
    """Divisibility failure: the moduli space for (g, r, mu) is empty.

    Not an error -- callers may record the corresponding count as 0.
    """

    g: int
    r: int
    mu: tuple[int, ...]
    residue: int

    @property
    def valid(self) -> bool:
        return False

    def to_json_obj(self) -> dict:
        return {
            "g": self.g,
            "r": self.r,
            "mu": list(self.mu),
            "valid": False,
            "residue": self.residue,
        }


@dataclass(frozen=True)
class SpinProfile:
    """A validated (g, r, mu) with its derived data."""

    g: int
    r: int
    mu: tuple[int, ...]
    m: int
    a: tuple[int, ...]
    regime: str

    @property
    def valid(self) -> bool:
        return True

    @property
    def l(self) -> int:
        return len(self.mu)

    @property
    def degree(self) -> int:
        return sum(self.mu)

    @property
    def dimension(self) -> int:
        """3g - 3 + l, the fixed-locus dimension in the general regime."""
        return 3 * self.g - 3 + self.l

    def to_json_obj(self) -> dict:
        return {
            "g": self.g,
            "r": self.r,
            "mu": list(self.mu),
            "valid": True,
            "m": self.m,
            "a": list(self.a),
            "regime": self.regime,
        }


def validate(g: int, r: int, mu) -> SpinProfile | EmptySpace:
    """Derive a SpinProfile, or report the space empty on divisibility failure."""
    if g < 0:
        raise ValueError("genus must be non-negative")
    if r < 1:
        raise ValueError("r must be a positive integer")
    parts = check_ordered_partition(mu)
    l = len(parts)
    total = 2 * g - 2 + l + sum(parts)
    if total % r:
        return EmptySpace(g=g, r=r, mu=parts, residue=total % r)
    a = tuple(r - 1 - remainder(p, r) for p in parts)
    if 3 * g - 3 + l >= 0:
        regime = REGIME_GENERAL
    elif l == 2:
        regime = REGIME_02
    else:
        regime = REGIME_01
    return SpinProfile(g=g, r=r, mu=parts, m=total // r, a=a, regime=regime)


def edge_root_degree(mu_i: int, r: int) -> int:
    """Degree floor(mu_i / r) of the r-th root along a degree-mu_i cover component."""
    if mu_i < 1 or r < 1:
        raise ValueError("edge_root_degree requires mu_i >= 1 and r >= 1")
    return mu_i // r


def spin_bundle_degree(p: SpinProfile) -> int:
    """Degree m - l - sum(floor(mu_i/r)) of the r-th root on the contracted vertex."""
    deg = p.m - p.l - sum(mu_i // p.r for mu_i in p.mu)
    alt, rem = divmod(2 * p.g - 2 - sum(p.a), p.r)
    if rem or alt != deg:
        raise InternalConsistencyError(
            f"root degree mismatch for {p}: {deg} vs (2g-2-sum a)/r = {alt} rem {rem}"
        )
    return deg


def flag_divisible_count(p: SpinProfile) -> int:
    """Number of parts divisible by r."""
    return sum(1 for mu_i in p.mu if mu_i % p.r == 0)


def coarse_root_degree(p: SpinProfile) -> int:
    """Root degree after forgetting the orbifold structure at the flag nodes.

    Forgetting the twist at a node with r | mu_i raises the degree by one;
    the result matches the divisor (2g-2 + sum(1 + <mu_i/r> - r) + r*#div)/r.
    """
    deg = spin_bundle_degree(p) + flag_divisible_count(p)
    numer = (
        2 * p.g
        - 2
        + sum(1 + remainder(mu_i, p.r) - p.r for mu_i in p.mu)
        + p.r * flag_divisible_count(p)
    )
    alt, rem = divmod(numer, p.r)
    if rem or alt != deg:
        raise InternalConsistencyError(
            f"coarse root degree mismatch for {p}: {deg} vs {numer}/r"
        )
    return deg


@dataclass(frozen=True)
class FixedLocusLabel:
    """Branch-divisor label [(m-n)*(0) + n*(inf)] of one torus-fixed component."""

    n: int
    m: int

    @property
    def simple(self) -> bool:
        return self.n == 0

    def __str__(self) -> str:
        tag = "simple" if self.simple else "non-simple"
        return f"h{self.n}=[{self.m - self.n}*(0)+{self.n}*(inf)] ({tag})"


def fixed_locus_labels(p: SpinProfile) -> list[FixedLocusLabel]:
    """The m+1 fixed-locus labels h_0 .. h_m; only h_0 is the simple locus."""
    return [FixedLocusLabel(n=n, m=p.m) for n in range(p.m + 1)]


def pushforward_degree(p: SpinProfile) -> Fraction:
    """Degree 1/(mu_1 ... mu_l) of the map from the simple locus to spin moduli.

    Used in every regime, including (0,1) and (0,2) where the target moduli
    are the degenerate special cases.
    """
    return Fraction(1, prod(p.mu))
