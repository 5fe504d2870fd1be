"""Symmetric-group data: partitions, characters, and completed power sums.

Characters are computed by the Murnaghan-Nakayama rule with memoization,
dimensions by the hook length formula.  The shifted power sums p-bar_k are
the completed-cycle eigenvalues used by the Hurwitz oracle; their constant
term is the zeta-regularized value (1 - 2^-k) zeta(-k) with zeta(-k)
expressed through exact Bernoulli numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from math import comb, factorial, prod

from .errors import BoundExceededError

DEFAULT_CHARACTER_BOUND = 12

PartitionT = tuple[int, ...]


def check_partition(parts) -> PartitionT:
    lam = tuple(int(x) for x in parts)
    if any(p < 1 for p in lam):
        raise ValueError(f"partition parts must be positive: {lam}")
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError(f"partition parts must be weakly decreasing: {lam}")
    return lam


@cache
def partitions(d: int) -> tuple[PartitionT, ...]:
    """All partitions of d as weakly decreasing tuples, in deterministic order."""
    if d < 0:
        raise ValueError("d must be non-negative")
    if d == 0:
        return ((),)

    def gen(n: int, cap: int):
        if n == 0:
            yield ()
            return
        for first in range(min(n, cap), 0, -1):
            for rest in gen(n - first, first):
                yield (first,) + rest

    return tuple(gen(d, d))


def conjugate(lam: PartitionT) -> PartitionT:
    if not lam:
        return ()
    out = [0] * lam[0]
    for part in lam:
        for j in range(part):
            out[j] += 1
    return tuple(out)


@cache
def dim(lam: PartitionT) -> int:
    """Dimension of the irreducible labelled by lam, by hook lengths."""
    lam = check_partition(lam) if lam else ()
    if not lam:
        return 1
    conj = conjugate(lam)
    n = factorial(sum(lam))
    for i, row in enumerate(lam):
        for j in range(row):
            hook = (row - j) + (conj[j] - i) - 1
            n //= hook
    return n


def z(rho: PartitionT) -> int:
    """Centralizer order prod_i i^{m_i} m_i! of a permutation of cycle type rho."""
    out = 1
    mult: dict[int, int] = {}
    for part in rho:
        mult[part] = mult.get(part, 0) + 1
    for part, m in mult.items():
        out *= part**m * factorial(m)
    return out


def aut_order(mu) -> int:
    """Order of the part-permuting symmetry group of a partition."""
    mult: dict[int, int] = {}
    for part in mu:
        mult[part] = mult.get(part, 0) + 1
    return prod(factorial(m) for m in mult.values())


def _border_strips(lam: PartitionT, size: int):
    """Ways to remove a connected border strip of the given size from lam."""
    rows = len(lam)
    for start in range(rows):
        strip = [0] * rows
        for row in range(start, rows):
            take = size - sum(strip)
            if take <= 0:
                break
            if row + 1 < rows:
                take = min(take, lam[row] - lam[row + 1] + 1)
            strip[row] = take
        if sum(strip) != size:
            continue
        rest = [lam[i] - strip[i] for i in range(rows)]
        if any(rest[i] < 0 for i in range(rows)):
            continue
        if any(rest[i] < rest[i + 1] for i in range(rows - 1)):
            continue
        height = sum(1 for s in strip if s > 0) - 1
        yield tuple(p for p in rest if p > 0), height


@cache
def character(lam: PartitionT, rho: PartitionT) -> int:
    """Character value chi^lam(rho) via the Murnaghan-Nakayama recursion."""
    if sum(lam) != sum(rho):
        raise ValueError("lam and rho must partition the same integer")
    if not lam:
        return 1
    value = 0
    head, rest = rho[0], rho[1:]
    for smaller, height in _border_strips(lam, head):
        term = character(smaller, rest)
        value += -term if height % 2 else term
    return value


@dataclass(frozen=True)
class CharacterTable:
    d: int
    values: dict[tuple[PartitionT, PartitionT], int]

    def chi(self, lam: PartitionT, rho: PartitionT) -> int:
        return self.values[(lam, rho)]


def characters(d: int, bound: int = DEFAULT_CHARACTER_BOUND) -> CharacterTable:
    """Full integer character table of S_d."""
    if d < 1 or d > bound:
        raise BoundExceededError(f"character table bound exceeded: d={d}, bound={bound}")
    parts = partitions(d)
    values = {
        (lam, rho): character(lam, rho) for lam in parts for rho in parts
    }
    return CharacterTable(d=d, values=values)


@cache
def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n with the convention B_1 = -1/2."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Fraction(1)
    acc = Fraction(0)
    for k in range(n):
        acc += comb(n + 1, k) * bernoulli(k)
    return -acc / (n + 1)


def zeta_negative(k: int) -> Fraction:
    """zeta(-k) = -B_{k+1}/(k+1) for integer k >= 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return -bernoulli(k + 1) / (k + 1)


@cache
def shifted_power_sum(lam: PartitionT, k: int) -> Fraction:
    """Completed power sum p-bar_k(lam).

    p-bar_k(lam) = sum_i [(lam_i - i + 1/2)^k - (-i + 1/2)^k]
                   + (1 - 2^-k) zeta(-k).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    acc = Fraction(0)
    half = Fraction(1, 2)
    for i, part in enumerate(lam, start=1):
        acc += (part - i + half) ** k - (-i + half) ** k
    return acc + (1 - Fraction(1, 2**k)) * zeta_negative(k)


def transposition_central_character(lam: PartitionT) -> Fraction:
    """Independent formula sum C(lam_i, 2) - C(lam'_i, 2); equals p-bar_2/2."""
    return Fraction(
        sum(comb(part, 2) for part in lam) - sum(comb(part, 2) for part in conjugate(lam))
    )
