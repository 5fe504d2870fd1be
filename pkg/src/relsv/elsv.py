"""Spin-moduli evaluation: prefactor, intersection tables, and fitted backends.

The localization output expresses each Hurwitz number as an explicit
prefactor times one intersection number of psi powers against the Chern
class of the negated root pushforward.  Degenerate (0,1)/(0,2) profiles use
closed special values; elsewhere the intersection table is either supplied
by the user or solved exactly from oracle values, exploiting that the
integrand is polynomial in the scaled parts mu_i / r once the residues
mod r are fixed.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from pathlib import Path

from .combi import REGIME_01, REGIME_02, REGIME_GENERAL, EmptySpace, SpinProfile, validate
from .errors import (
    IncompleteTableError,
    RegimeError,
    SolveInconsistentError,
    SolveRankError,
)
from .hurwitz import HurwitzOracle, HurwitzQuery

TableKey = tuple[tuple[int, ...], int]  # (psi exponent vector, Chern degree)


@dataclass(frozen=True, eq=True)
class IntersectionTable:
    """Intersection numbers on one spin-moduli component, keyed by residue data."""

    g: int
    r: int
    a: tuple[int, ...]
    l: int
    entries: tuple[tuple[TableKey, Fraction], ...]

    @property
    def dimension(self) -> int:
        return 3 * self.g - 3 + self.l

    def value(self, b: tuple[int, ...], k: int) -> Fraction:
        for key, v in self.entries:
            if key == (b, k):
                return v
        raise IncompleteTableError(f"missing table entry {(b, k)}")

    def as_dict(self) -> dict[TableKey, Fraction]:
        return dict(self.entries)

    def to_json_obj(self) -> dict:
        return {
            "g": self.g,
            "r": self.r,
            "a": list(self.a),
            "l": self.l,
            "entries": [
                {"b": list(b), "k": k, "value": str(v)} for (b, k), v in self.entries
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "IntersectionTable":
        entries = tuple(
            ((tuple(e["b"]), int(e["k"])), Fraction(e["value"]))
            for e in obj["entries"]
        )
        return cls(
            g=int(obj["g"]),
            r=int(obj["r"]),
            a=tuple(obj["a"]),
            l=int(obj["l"]),
            entries=entries,
        )


def monomial_basis(g: int, l: int) -> list[TableKey]:
    """All (psi exponents, Chern degree) with total degree 3g - 3 + l."""
    dim = 3 * g - 3 + l
    if dim < 0:
        raise RegimeError("no intersection monomials below dimension 0")
    basis: list[TableKey] = []

    def rec(prefix: list[int], remaining: int, slots: int):
        if slots == 0:
            basis.append((tuple(prefix), remaining))
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], dim, l)
    return basis


# ---------------------------------------------------------------------------
# Evaluation pieces
# ---------------------------------------------------------------------------


def prefactor(p: SpinProfile) -> Fraction:
    """m! r^(m + l + 2g - 2) prod (mu_i/r)^floor(mu_i/r) / floor(mu_i/r)!"""
    value = Fraction(factorial(p.m)) * Fraction(p.r) ** (p.m + p.l + 2 * p.g - 2)
    for mu_i in p.mu:
        k = mu_i // p.r
        value *= Fraction(mu_i, p.r) ** k / factorial(k)
    return value


def special_value(p: SpinProfile) -> Fraction:
    """The defined values of the degenerate integrals.

    (0,1): 1/mu_1^2 when r | (mu_1 - 1), else 0;
    (0,2): 1/(mu_1 + mu_2) when r | (mu_1 + mu_2), else 0.
    Valid profiles always satisfy the divisibility, which is restated here
    so the function is total on raw inputs as well.
    """
    if p.regime == REGIME_01:
        return Fraction(1, p.mu[0] ** 2) if (p.mu[0] - 1) % p.r == 0 else Fraction(0)
    if p.regime == REGIME_02:
        s = sum(p.mu)
        return Fraction(1, s) if s % p.r == 0 else Fraction(0)
    raise RegimeError("special values exist only in the (0,1) and (0,2) regimes")


def integrand_value(p: SpinProfile, table: IntersectionTable) -> Fraction:
    """sum over the table of entry * prod (mu_i/r)^(b_i)."""
    if (table.g, table.r, table.a, table.l) != (p.g, p.r, p.a, p.l):
        raise RegimeError(
            f"table keyed {(table.g, table.r, table.a, table.l)} does not match "
            f"profile {(p.g, p.r, p.a, p.l)}"
        )
    entries = table.as_dict()
    total = Fraction(0)
    for b, k in monomial_basis(p.g, p.l):
        if (b, k) not in entries:
            raise IncompleteTableError(f"missing table entry {(b, k)}")
        weight = Fraction(1)
        for mu_i, b_i in zip(p.mu, b):
            weight *= Fraction(mu_i, p.r) ** b_i
        total += entries[(b, k)] * weight
    return total


# ---------------------------------------------------------------------------
# Solve-from-oracle backend
# ---------------------------------------------------------------------------


def sample_profiles(
    g: int, r: int, a: tuple[int, ...], count: int, max_degree: int
) -> list[SpinProfile]:
    """Valid profiles sharing (g, r, a), ordered by degree then parts.

    Parts are residue + r*k with the k-vectors swept in a deterministic
    order; varying the floors spans the monomial basis of the integrand.
    """
    l = len(a)
    residues = [r - 1 - a_i for a_i in a]
    if any(not 0 <= res < r for res in residues):
        raise ValueError(f"invalid residue data a={a} for r={r}")
    out: list[SpinProfile] = []
    total = 0
    while len(out) < count:
        # enumerate k-vectors with sum(k) == total
        found_any = False
        for ks in _compositions(total, l):
            mu = tuple(res + r * k for res, k in zip(residues, ks))
            if any(x < 1 for x in mu):
                continue
            if sum(mu) > max_degree:
                continue
            found_any = True
            p = validate(g, r, mu)
            if isinstance(p, SpinProfile) and p.regime == REGIME_GENERAL:
                out.append(p)
                if len(out) == count:
                    break
        total += 1
        if not found_any and total > max_degree + r:
            break
    if len(out) < count:
        raise SolveRankError(
            f"only {len(out)} of {count} samples available for "
            f"(g={g}, r={r}, a={a}) within degree {max_degree}"
        )
    return out


def _compositions(total: int, slots: int):
    if slots == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, slots - 1):
            yield (head,) + rest


def _solve_exact(
    rows: list[list[Fraction]], rhs: list[Fraction], unknowns: int
) -> list[Fraction]:
    """Gaussian elimination over the rationals with full consistency checking."""
    aug = [row[:] + [b] for row, b in zip(rows, rhs)]
    n_rows = len(aug)
    pivot_cols: list[int] = []
    row_idx = 0
    for col in range(unknowns):
        pivot = next(
            (i for i in range(row_idx, n_rows) if aug[i][col] != 0), None
        )
        if pivot is None:
            continue
        aug[row_idx], aug[pivot] = aug[pivot], aug[row_idx]
        head = aug[row_idx][col]
        aug[row_idx] = [x / head for x in aug[row_idx]]
        for i in range(n_rows):
            if i != row_idx and aug[i][col] != 0:
                factor = aug[i][col]
                aug[i] = [x - factor * y for x, y in zip(aug[i], aug[row_idx])]
        pivot_cols.append(col)
        row_idx += 1
    if len(pivot_cols) < unknowns:
        raise SolveRankError(
            f"sample set has rank {len(pivot_cols)} < {unknowns}; add more samples"
        )
    residuals = [aug[i][-1] for i in range(row_idx, n_rows) if aug[i][-1] != 0]
    if residuals:
        raise SolveInconsistentError(
            f"overdetermined system is inconsistent; residuals {residuals}"
        )
    solution = [Fraction(0)] * unknowns
    for i, col in enumerate(pivot_cols):
        solution[col] = aug[i][-1]
    return solution


def solve_backend(
    g: int,
    r: int,
    a: tuple[int, ...],
    l: int,
    samples: list[SpinProfile],
    oracle: HurwitzOracle,
) -> IntersectionTable:
    """Invert the evaluation formula: fit the intersection table to oracle values.

    Each sample contributes one equation H/prefactor = integrand; the system
    must have full rank, and any extra samples are consistency rows that the
    solution has to satisfy exactly.
    """
    a = tuple(a)
    if l != len(a):
        raise ValueError("l must equal len(a)")
    basis = monomial_basis(g, l)
    for p in samples:
        if (p.g, p.r, p.a, p.l) != (g, r, a, l):
            raise ValueError(f"sample {p} does not share (g, r, a, l)")
    if len(samples) < len(basis):
        raise SolveRankError(
            f"{len(samples)} samples for {len(basis)} unknowns; add more samples"
        )
    rows = []
    rhs = []
    for p in samples:
        row = []
        for b, _k in basis:
            weight = Fraction(1)
            for mu_i, b_i in zip(p.mu, b):
                weight *= Fraction(mu_i, p.r) ** b_i
            row.append(weight)
        rows.append(row)
        rhs.append(oracle.evaluate(HurwitzQuery(p)) / prefactor(p))
    solution = _solve_exact(rows, rhs, len(basis))
    entries = tuple((key, value) for key, value in zip(basis, solution))
    return IntersectionTable(g=g, r=r, a=a, l=l, entries=entries)


def fit_table(
    g: int,
    r: int,
    a: tuple[int, ...],
    oracle: HurwitzOracle,
    held_out: int = 3,
    max_degree: int | None = None,
) -> IntersectionTable:
    """Generate samples, fit, and verify the fit on the held-out samples."""
    a = tuple(a)
    l = len(a)
    basis = monomial_basis(g, l)
    if max_degree is None:
        max_degree = oracle.char_bound
    samples = sample_profiles(g, r, a, len(basis) + held_out, max_degree)
    table = solve_backend(g, r, a, l, samples, oracle)
    for p in samples[len(basis):]:
        predicted = prefactor(p) * integrand_value(p, table)
        actual = oracle.evaluate(HurwitzQuery(p))
        if predicted != actual:
            raise SolveInconsistentError(
                f"held-out sample {p.mu}: table predicts {predicted}, oracle says {actual}"
            )
    return table


# ---------------------------------------------------------------------------
# Backends and evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Backend:
    """How to evaluate the spin-moduli integral.

    kinds: "special" (degenerate closed values), "table" (user table),
    "solve" (fit a table from the oracle on demand).
    """

    kind: str
    table: IntersectionTable | None = None

    @classmethod
    def special(cls) -> "Backend":
        return cls(kind="special")

    @classmethod
    def solve(cls) -> "Backend":
        return cls(kind="solve")

    @classmethod
    def from_table(cls, table: IntersectionTable) -> "Backend":
        return cls(kind="table", table=table)


def evaluate(
    p: SpinProfile | EmptySpace,
    backend: Backend,
    oracle: HurwitzOracle | None = None,
    cache: "TableCache | None" = None,
) -> Fraction:
    """Prefactor times integrand value; 0 for an empty space."""
    if isinstance(p, EmptySpace):
        return Fraction(0)
    if backend.kind == "special":
        if p.regime not in (REGIME_01, REGIME_02):
            raise RegimeError("special backend only covers the (0,1)/(0,2) regimes")
        return prefactor(p) * special_value(p)
    if p.regime in (REGIME_01, REGIME_02):
        # degenerate regimes always evaluate through the defined specials
        return prefactor(p) * special_value(p)
    if backend.kind == "table":
        if backend.table is None:
            raise IncompleteTableError("table backend has no table attached")
        return prefactor(p) * integrand_value(p, backend.table)
    if backend.kind == "solve":
        if oracle is None:
            raise ValueError("solve backend requires an oracle")
        table = None
        if cache is not None:
            table = cache.get(p.g, p.r, p.a)
        if table is None:
            table = fit_table(p.g, p.r, p.a, oracle)
            if cache is not None:
                cache.put(table)
        return prefactor(p) * integrand_value(p, table)
    raise ValueError(f"unknown backend kind {backend.kind!r}")


class TableCache:
    """In-memory table cache with optional JSON persistence.

    The directory comes from the constructor or the RELSV_CACHE_DIR
    environment variable; without either, tables only live in memory.
    """

    def __init__(self, directory: str | os.PathLike | None = None):
        if directory is None:
            directory = os.environ.get("RELSV_CACHE_DIR") or None
        self.directory = Path(directory) if directory else None
        self._memory: dict[tuple[int, int, tuple[int, ...]], IntersectionTable] = {}

    def _path(self, g: int, r: int, a: tuple[int, ...]) -> Path:
        name = f"table_g{g}_r{r}_a{'-'.join(map(str, a))}.json"
        return self.directory / name

    def get(self, g: int, r: int, a: tuple[int, ...]) -> IntersectionTable | None:
        key = (g, r, tuple(a))
        if key in self._memory:
            return self._memory[key]
        if self.directory is not None:
            path = self._path(g, r, tuple(a))
            if path.is_file():
                table = IntersectionTable.from_json_obj(json.loads(path.read_text()))
                self._memory[key] = table
                return table
        return None

    def put(self, table: IntersectionTable):
        key = (table.g, table.r, table.a)
        self._memory[key] = table
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            path = self._path(table.g, table.r, table.a)
            path.write_text(json.dumps(table.to_json_obj(), indent=2) + "\n")
