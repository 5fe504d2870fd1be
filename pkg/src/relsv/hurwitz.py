"""Independent oracle for divisible-ramification Hurwitz numbers.

Three ingredients:

* a disconnected character bracket over partitions of the degree, with one
  completed power sum p-bar_{r+1} per interior branch point;
* connected-part extraction by set-partition inversion over the labelled
  parts of mu together with the labelled branch-point slots (blocks made of
  slots alone are contracted components; their forced genus comes from the
  branch-count relation r*m_B = 2g_B - 2 + l_B + |mu_B|);
* a calibration step that pins the normalization of the bracket against
  closed-form values of the localization formula, then freezes it.

The brute-force monodromy count at r = 1 is kept deliberately independent
of the character machinery: it enumerates transposition tuples directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod

from . import charsym
from .combi import (
    REGIME_01,
    EmptySpace,
    SpinProfile,
    validate,
)
from .errors import BoundExceededError, CalibrationError

DEFAULT_BRUTE_SIZE_BOUND = 7
DEFAULT_BRUTE_BRANCH_BOUND = 6


@dataclass(frozen=True)
class HurwitzQuery:
    profile: SpinProfile
    connected: bool = True


@dataclass(frozen=True)
class Calibration:
    """Frozen normalization H = alpha^m * beta^l * [regime01_factor] * bracket.

    ``aut_mode`` records that the bracket is scaled by |Aut mu| so that the
    labelled relative points match the ordered-partition convention.  The
    strict two-constant shape cannot absorb the extra factor that the
    closed forms carry in the (0,1) regime; that factor is solved for
    separately and ``strict_two_param`` reports whether it turned out
    trivial.  See ``HurwitzOracle.calibrate``.
    """

    r: int
    alpha: Fraction
    beta: Fraction
    aut_mode: str
    regime01_factor: Fraction
    strict_two_param: bool
    points: tuple[tuple[tuple[int, ...], Fraction], ...] = field(default=())

    def normalization(self, profile: SpinProfile) -> Fraction:
        value = self.alpha**profile.m * self.beta**profile.l
        if profile.regime == REGIME_01:
            value *= self.regime01_factor
        return value


def _forced_genus_ok(l: int, d: int, m: int, r: int) -> bool:
    # r*m = 2g - 2 + l + d  =>  g = (r*m + 2 - l - d)/2 must be a
    # non-negative integer for a connected piece to exist.
    numer = r * m + 2 - l - d
    return numer >= 0 and numer % 2 == 0


class HurwitzOracle:
    """Character-sum oracle with per-r calibration and memoized brackets."""

    def __init__(
        self,
        char_bound: int = charsym.DEFAULT_CHARACTER_BOUND,
        brute_size_bound: int = DEFAULT_BRUTE_SIZE_BOUND,
        brute_branch_bound: int = DEFAULT_BRUTE_BRANCH_BOUND,
    ):
        self.char_bound = char_bound
        self.brute_size_bound = brute_size_bound
        self.brute_branch_bound = brute_branch_bound
        self._bracket_cache: dict = {}
        self._connected_cache: dict = {}
        self._calibrations: dict[int, Calibration] = {}

    # -- disconnected bracket ------------------------------------------------

    def disconnected_bracket(self, d: int, mu, r: int, m: int) -> Fraction:
        """sum_lam (dim/d!) (chi^lam(mu)/z_mu) p-bar_{r+1}(lam)^m, unnormalized."""
        mu = tuple(sorted(mu, reverse=True))
        if sum(mu) != d:
            raise ValueError("mu must partition d")
        if m < 0:
            raise ValueError("m must be non-negative")
        key = (d, mu, r, m)
        if key in self._bracket_cache:
            return self._bracket_cache[key]
        if d == 0:
            value = charsym.shifted_power_sum((), r + 1) ** m
        else:
            if d > self.char_bound:
                raise BoundExceededError(
                    f"degree {d} exceeds character bound {self.char_bound}"
                )
            dfact = factorial(d)
            zmu = charsym.z(mu)
            value = Fraction(0)
            for lam in charsym.partitions(d):
                chi = charsym.character(lam, mu)
                if not chi:
                    continue
                eig = charsym.shifted_power_sum(lam, r + 1)
                value += Fraction(charsym.dim(lam), dfact) * Fraction(chi, zmu) * eig**m
        self._bracket_cache[key] = value
        return value

    def _labelled_disconnected(self, mu: tuple[int, ...], r: int, m: int) -> Fraction:
        """|Aut mu| times the bracket: the count with labelled relative points."""
        if not mu:
            return charsym.shifted_power_sum((), r + 1) ** m
        return charsym.aut_order(mu) * self.disconnected_bracket(sum(mu), mu, r, m)

    # -- connected extraction -------------------------------------------------

    def connected_bracket(self, mu, r: int, m: int) -> Fraction:
        """Connected part of the labelled bracket, still unnormalized.

        Set-partition inversion anchored at the first labelled part: every
        assembly of a disconnected cover has a distinguished block containing
        that part, and the remaining labels assemble freely.
        """
        mu = tuple(sorted(mu, reverse=True))
        key = (mu, r, m)
        if key in self._connected_cache:
            return self._connected_cache[key]

        if not mu:
            # contracted components: a single slot of completed-cycle weight
            value = charsym.shifted_power_sum((), r + 1) if m == 1 else Fraction(0)
            if m == 1 and not _forced_genus_ok(0, 0, 1, r):
                value = Fraction(0)
            self._connected_cache[key] = value
            return value

        total = self._labelled_disconnected(mu, r, m)
        rest = mu[1:]
        n_rest = len(rest)
        for mask in range(1 << n_rest):
            block_rest = tuple(rest[i] for i in range(n_rest) if mask >> i & 1)
            other = tuple(rest[i] for i in range(n_rest) if not mask >> i & 1)
            block = tuple(sorted((mu[0],) + block_rest, reverse=True))
            for j in range(m + 1):
                if mask == (1 << n_rest) - 1 and j == m:
                    continue  # that term is the connected value itself
                total -= (
                    self.connected_bracket(block, r, j)
                    * comb(m, j)
                    * self._labelled_disconnected(other, r, m - j)
                )
        if not _forced_genus_ok(len(mu), sum(mu), m, r):
            total = Fraction(0)
        self._connected_cache[key] = total
        return total

    def connected_from_disconnected(self, query: HurwitzQuery) -> Fraction:
        """Raw connected bracket for a validated profile (normalization elsewhere)."""
        p = query.profile
        return self.connected_bracket(p.mu, p.r, p.m)

    # -- calibration -----------------------------------------------------------

    def _closed_form_target(self, p: SpinProfile) -> Fraction:
        # (0,1): mu_1^(m-2)/r;  (0,2): m! r^m prod((mu_i/r)^floor / floor!) / (mu_1+mu_2).
        # Both are the localization closed forms; the oracle is pinned to them.
        if p.regime == REGIME_01:
            return Fraction(p.mu[0]) ** (p.m - 2) / p.r
        value = Fraction(factorial(p.m)) * Fraction(p.r) ** p.m
        for mu_i in p.mu:
            k = mu_i // p.r
            value *= Fraction(mu_i, p.r) ** k / factorial(k)
        return value / sum(p.mu)

    def _calibration_profiles(self, r: int) -> tuple[list[SpinProfile], list[SpinProfile]]:
        """Valid (0,1) and (0,2) profiles with degree within the character bound."""
        one_part = []
        for mu1 in range(1, self.char_bound + 1):
            p = validate(0, r, (mu1,))
            if isinstance(p, SpinProfile):
                one_part.append(p)
        two_part = []
        for mu1 in range(1, self.char_bound):
            for mu2 in range(mu1, self.char_bound + 1 - mu1):
                p = validate(0, r, (mu1, mu2))
                if isinstance(p, SpinProfile):
                    two_part.append(p)
        return one_part, two_part

    def calibrate(self, r: int) -> Calibration:
        """Solve and freeze the bracket normalization for this r.

        alpha and beta are solved from (0,2)-regime closed forms (two
        consecutive values of m give alpha; beta^2 comes out of either
        point and must be an exact rational square).  The (0,1)-regime
        points then determine one extra constant; a strict two-constant
        fit corresponds to that constant being 1.  Every remaining
        calibration point must be reproduced exactly or calibration
        aborts with diagnostics.
        """
        if r in self._calibrations:
            return self._calibrations[r]
        if r < 1:
            raise ValueError("r must be >= 1")

        one_part, two_part = self._calibration_profiles(r)
        if len(two_part) < 2 or not one_part:
            raise CalibrationError(f"not enough calibration profiles for r={r}")

        def raw(p: SpinProfile) -> Fraction:
            value = self.connected_bracket(p.mu, p.r, p.m)
            if value == 0:
                raise CalibrationError(f"vanishing bracket at calibration point {p}")
            return value

        by_m = {}
        for p in two_part:
            by_m.setdefault(p.m, p)
        ms = sorted(by_m)
        consecutive = next(((a, b) for a, b in zip(ms, ms[1:]) if b == a + 1), None)
        if consecutive is None:
            raise CalibrationError(f"no consecutive-m pair of (0,2) points for r={r}")
        p1, p2 = by_m[consecutive[0]], by_m[consecutive[1]]
        ratio1 = self._closed_form_target(p1) / raw(p1)   # alpha^m1 beta^2
        ratio2 = self._closed_form_target(p2) / raw(p2)   # alpha^(m1+1) beta^2
        alpha = ratio2 / ratio1
        beta_sq = ratio1 / alpha ** p1.m
        beta = _exact_sqrt(beta_sq)
        if beta is None:
            raise CalibrationError(
                f"beta^2 = {beta_sq} is not a rational square (r={r})"
            )

        q = one_part[0]
        regime01_factor = self._closed_form_target(q) / (
            alpha**q.m * beta**q.l * raw(q)
        )

        calibration = Calibration(
            r=r,
            alpha=alpha,
            beta=beta,
            aut_mode="ordered",
            regime01_factor=regime01_factor,
            strict_two_param=(regime01_factor == 1),
            points=tuple(
                (p.mu, self._closed_form_target(p)) for p in one_part + two_part
            ),
        )

        # hold-out verification across every calibration profile
        mismatches = []
        for p in one_part + two_part:
            got = calibration.normalization(p) * self.connected_bracket(p.mu, p.r, p.m)
            want = self._closed_form_target(p)
            if got != want:
                mismatches.append((p.mu, str(want), str(got)))
        if mismatches:
            raise CalibrationError(
                f"normalization of shape alpha^m beta^l (+ (0,1) factor) does not "
                f"fit all closed-form points for r={r}; residuals {mismatches}"
            )

        self._calibrations[r] = calibration
        return calibration

    # -- evaluation --------------------------------------------------------------

    def evaluate(self, query: HurwitzQuery | SpinProfile | EmptySpace) -> Fraction:
        """Calibrated Hurwitz number; 0 for an empty space."""
        if isinstance(query, EmptySpace):
            return Fraction(0)
        if isinstance(query, SpinProfile):
            query = HurwitzQuery(profile=query)
        if isinstance(query.profile, EmptySpace):
            return Fraction(0)
        p = query.profile
        calibration = self.calibrate(p.r)
        bracket = (
            self.connected_bracket(p.mu, p.r, p.m)
            if query.connected
            else self._labelled_disconnected(tuple(sorted(p.mu, reverse=True)), p.r, p.m)
        )
        return calibration.normalization(p) * bracket


def _exact_sqrt(value: Fraction) -> Fraction | None:
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = _isqrt_exact(num), _isqrt_exact(den)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _isqrt_exact(n: int) -> int | None:
    from math import isqrt

    root = isqrt(n)
    return root if root * root == n else None


# ---------------------------------------------------------------------------
# Brute-force ground truth at r = 1
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _transpositions(d: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for i in range(d):
        for j in range(i + 1, d):
            perm = list(range(d))
            perm[i], perm[j] = perm[j], perm[i]
            out.append(tuple(perm))
    return tuple(out)


def _merge_blocks(labels: tuple[int, ...], i: int, j: int) -> tuple[int, ...]:
    a, b = labels[i], labels[j]
    if a == b:
        return labels
    lo, hi = min(a, b), max(a, b)
    merged = tuple(lo if x == hi else x for x in labels)
    # renormalize to first-appearance order so states stay canonical
    remap: dict[int, int] = {}
    out = []
    for x in merged:
        if x not in remap:
            remap[x] = len(remap)
        out.append(remap[x])
    return tuple(out)


def _cycle_type(perm: tuple[int, ...]) -> tuple[int, ...]:
    seen = [False] * len(perm)
    sizes = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        size = 0
        cur = start
        while not seen[cur]:
            seen[cur] = True
            cur = perm[cur]
            size += 1
        sizes.append(size)
    return tuple(sorted(sizes, reverse=True))


def brute_force_r1(
    mu,
    m: int,
    size_bound: int = DEFAULT_BRUTE_SIZE_BOUND,
    branch_bound: int = DEFAULT_BRUTE_BRANCH_BOUND,
) -> Fraction:
    """Simple Hurwitz number by direct monodromy enumeration.

    Counts tuples (tau_1, ..., tau_m, sigma) of permutations of {1..d} with
    every tau a transposition, sigma of cycle type mu, the product equal to
    the identity and the generated subgroup transitive; the count is divided
    by d! and multiplied by |Aut mu| for the labelled-parts convention.

    Transitivity is tracked as connectivity of the multigraph whose edges
    are the transposition supports, via a level DP over (partial product,
    vertex partition) states.
    """
    mu = tuple(sorted(mu, reverse=True))
    d = sum(mu)
    if d < 1:
        raise ValueError("mu must be non-empty")
    if d > size_bound or m > branch_bound:
        raise BoundExceededError(
            f"enumeration bound exceeded: |mu|={d} (bound {size_bound}), "
            f"m={m} (bound {branch_bound})"
        )
    if m < 0:
        raise ValueError("m must be non-negative")

    identity = tuple(range(d))
    discrete = tuple(range(d))
    states: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {(identity, discrete): 1}
    taus = _transpositions(d)
    supports = []
    for tau in taus:
        moved = [i for i in range(d) if tau[i] != i]
        supports.append((moved[0], moved[1]))

    for _ in range(m):
        nxt: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}
        for (perm, blocks), count in states.items():
            for tau, (i, j) in zip(taus, supports):
                new_perm = tuple(perm[tau[k]] for k in range(d))
                key = (new_perm, _merge_blocks(blocks, i, j))
                nxt[key] = nxt.get(key, 0) + count
        states = nxt

    single_block = tuple([0] * d)
    total = 0
    for (perm, blocks), count in states.items():
        if blocks != single_block:
            continue
        # sigma is forced: the inverse of the product of the transpositions
        inv = [0] * d
        for k in range(d):
            inv[perm[k]] = k
        if _cycle_type(tuple(inv)) == mu:
            total += count
    return Fraction(charsym.aut_order(mu) * total, factorial(d))
