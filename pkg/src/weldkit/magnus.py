"""Exact arithmetic in the reduced free group via the Magnus expansion.

The expansion sends the i-th meridian to 1 + x_i in the ring of integer
polynomials in noncommuting variables x_1..x_n, truncated by deleting every
monomial in which some variable repeats.  In this quotient (1 + x_i) is a
unit with inverse 1 - x_i, products stay supported on repetition-free
monomials (at most sum_k n!/(n-k)! of them), and coefficients are exact
Python ints.

Equality of expansions is this module's operating definition of equality in
the reduced free group; the classical fact that the expansion is faithful
there is taken as given, and no other equality route is used anywhere in the
package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .group import PeripheralSystem, Word

Monomial = tuple[int, ...]


class ReducedPoly:
    """Integer polynomial on repetition-free monomials in x_1..x_n."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: "dict[Monomial, int] | None" = None):
        self.n = n
        self.coeffs: dict[Monomial, int] = {}
        if coeffs:
            for mono, c in coeffs.items():
                if c:
                    if len(set(mono)) != len(mono):
                        raise ValueError(f"repeated variable in monomial {mono}")
                    self.coeffs[tuple(mono)] = c

    @staticmethod
    def one(n: int) -> "ReducedPoly":
        return ReducedPoly(n, {(): 1})

    @staticmethod
    def var(n: int, i: int) -> "ReducedPoly":
        if not 1 <= i <= n:
            raise ValueError(f"variable {i} out of range")
        return ReducedPoly(n, {(i,): 1})

    def coeff(self, mono: Iterable[int]) -> int:
        return self.coeffs.get(tuple(mono), 0)

    def key(self) -> tuple:
        """Hashable canonical form (for search deduplication)."""
        return (self.n, tuple(sorted(self.coeffs.items())))

    def __eq__(self, other) -> bool:
        return (isinstance(other, ReducedPoly)
                and self.n == other.n and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash(self.key())

    def __add__(self, other: "ReducedPoly") -> "ReducedPoly":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return ReducedPoly(self.n, out)

    def __neg__(self) -> "ReducedPoly":
        return ReducedPoly(self.n, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "ReducedPoly") -> "ReducedPoly":
        return self + (-other)

    def __mul__(self, other: "ReducedPoly") -> "ReducedPoly":
        out: dict[Monomial, int] = {}
        for m1, c1 in self.coeffs.items():
            s1 = set(m1)
            for m2, c2 in other.coeffs.items():
                if s1.intersection(m2):
                    continue
                m = m1 + m2
                out[m] = out.get(m, 0) + c1 * c2
        return ReducedPoly(self.n, out)

    def mul_one_plus_var(self, i: int, sign: int) -> "ReducedPoly":
        """Right-multiply by (1 + sign*x_i); the workhorse of expand()."""
        out = dict(self.coeffs)
        for m, c in self.coeffs.items():
            if i in m:
                continue
            key = m + (i,)
            out[key] = out.get(key, 0) + sign * c
        return ReducedPoly(self.n, out)

    @property
    def is_one(self) -> bool:
        return self.coeffs == {(): 1}

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for m, c in sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0])):
            var = "".join(f"x{i}" for i in m) or "1"
            bits.append(f"{c:+d}*{var}" if var != "1" else f"{c:+d}")
        return " ".join(bits)


def mul(p: ReducedPoly, q: ReducedPoly) -> ReducedPoly:
    if p.n != q.n:
        raise ValueError("variable counts differ")
    return p * q


def inv(p: ReducedPoly) -> ReducedPoly:
    """Inverse of a unit (constant term 1): finite geometric series, since
    every monomial product of length > n repeats a variable."""
    if p.coeff(()) != 1:
        raise ValueError("inv() needs constant term 1")
    q = p - ReducedPoly.one(p.n)
    acc = ReducedPoly.one(p.n)
    term = ReducedPoly.one(p.n)
    for _ in range(p.n):
        term = term * (-q)
        if not term.coeffs:
            break
        acc = acc + term
    return acc


def poly_pow(p: ReducedPoly, k: int) -> ReducedPoly:
    base = p if k >= 0 else inv(p)
    out = ReducedPoly.one(p.n)
    for _ in range(abs(k)):
        out = out * base
    return out


def expand(word: Word, n: int) -> ReducedPoly:
    """Magnus expansion of a word over meridians m1..mn."""
    out = ReducedPoly.one(n)
    for letter in word:
        g = abs(letter)
        if not 1 <= g <= n:
            raise ValueError(f"letter {letter} out of range for n={n}")
        out = out.mul_one_plus_var(g, 1 if letter > 0 else -1)
    return out


def rf_equal(u: Word, v: Word, n: int) -> bool:
    """Equality in the reduced free group on n meridians."""
    return expand(u, n) == expand(v, n)


def rf_trivial(w: Word, n: int) -> bool:
    return expand(w, n).is_one


# -- Milnor tables ----------------------------------------------------------------


@dataclass(frozen=True)
class TableEntry:
    index: Monomial          # I, distinct entries, target j not among them
    target: int              # j
    mu: int                  # coefficient of x_I in the expansion of longitude j
    delta: int               # indeterminacy gcd (0 when the family is empty)
    mubar: int               # residue in [0, delta) when delta > 0, else mu

    def to_json(self) -> dict:
        return {"I": list(self.index), "j": self.target,
                "mu": self.mu, "delta": self.delta, "mubar": self.mubar}


@dataclass(frozen=True)
class MilnorTable:
    n: int
    max_length: int
    residues: bool
    entries: tuple[TableEntry, ...]

    def entry(self, index: Iterable[int], target: int) -> TableEntry:
        key = (tuple(index), target)
        for e in self.entries:
            if (e.index, e.target) == key:
                return e
        raise KeyError(key)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "max_length": self.max_length,
            "residues": self.residues,
            "entries": [e.to_json() for e in self.entries],
        }


def _subsequence_family(full: Monomial) -> set[Monomial]:
    """Sequences obtained by deleting at least one index and cyclically
    permuting the rest; only lengths >= 2 carry invariants."""
    out: set[Monomial] = set()
    m = len(full)
    for mask in range(1, 2 ** m - 1):
        sub = tuple(full[k] for k in range(m) if mask >> k & 1)
        if len(sub) < 2:
            continue
        for r in range(len(sub)):
            out.add(sub[r:] + sub[:r])
    return out


def _entries_from_expansions(expansions: "list[ReducedPoly]", n: int,
                             max_length: int, residues: bool) -> tuple[TableEntry, ...]:
    def coeff(seq: Monomial) -> int:
        return expansions[seq[-1] - 1].coeff(seq[:-1])

    entries = []
    for total in range(2, max_length + 1):
        for seq in _distinct_sequences(n, total):
            mu_raw = coeff(seq)
            if residues:
                fam = _subsequence_family(seq)
                delta = 0
                for sub in fam:
                    delta = math.gcd(delta, coeff(sub))
                mubar = mu_raw % delta if delta else mu_raw
            else:
                delta = 0
                mubar = mu_raw
            entries.append(TableEntry(seq[:-1], seq[-1], mu_raw, delta, mubar))
    return tuple(entries)


def _distinct_sequences(n: int, total: int):
    """All length-``total`` sequences of distinct indices in 1..n, ordered by
    (target j, then index tuple): the canonical table order."""
    import itertools

    out = []
    for j in range(1, n + 1):
        rest = [i for i in range(1, n + 1) if i != j]
        for I in itertools.permutations(rest, total - 1):
            out.append(I + (j,))
    return out


def milnor_table(system: PeripheralSystem, max_length: "int | None" = None,
                 residues: bool = True, threads: int = 1) -> MilnorTable:
    """Milnor numbers mu(I; j) = coefficient of x_I in the expansion of the
    j-th longitude, with the classical residue convention.

    delta(I; j) is the gcd of mu over all proper subsequences of (I, j)
    (deleting at least one index, up to cyclic permutation); mubar is mu
    modulo delta.  ``residues=False`` keeps raw coefficients instead (useful
    for fixed-basing comparisons).
    """
    n = system.n
    if system.meridians != tuple(range(1, n + 1)):
        raise ValueError("milnor_table needs a system over meridians")
    if max_length is None:
        max_length = n
    if not 1 <= max_length <= n:
        raise ValueError(f"max_length must be in 1..{n}")
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            expansions = list(pool.map(lambda w: expand(w, n), system.longitudes))
    else:
        expansions = [expand(w, n) for w in system.longitudes]
    return MilnorTable(n, max_length, residues,
                       _entries_from_expansions(expansions, n, max_length, residues))


def table_from_expansions(expansions: "list[ReducedPoly]", max_length: int,
                          residues: bool = True) -> MilnorTable:
    n = expansions[0].n if expansions else 0
    return MilnorTable(n, max_length, residues,
                       _entries_from_expansions(expansions, n, max_length, residues))


def tables_equal(t1: MilnorTable, t2: MilnorTable) -> bool:
    """Componentwise residue equality; raises on dimension mismatch."""
    if t1.n != t2.n or t1.max_length != t2.max_length:
        raise ValueError("table dimensions differ")
    m1 = {(e.index, e.target): e.mubar for e in t1.entries}
    m2 = {(e.index, e.target): e.mubar for e in t2.entries}
    return m1 == m2


def first_difference(t1: MilnorTable, t2: MilnorTable) -> "tuple[TableEntry, TableEntry] | None":
    """First residue disagreement in canonical order, as an entry pair."""
    if t1.n != t2.n or t1.max_length != t2.max_length:
        raise ValueError("table dimensions differ")
    by_key = {(e.index, e.target): e for e in t2.entries}
    for e in t1.entries:
        other = by_key[(e.index, e.target)]
        if e.mubar != other.mubar:
            return e, other
    return None
