"""Simplicial homology over Z, Q, and prime fields via Smith normal form.

All matrix arithmetic is exact over Python's arbitrary-precision
integers.  The Smith normal form tracks unimodular transforms U, V with
U * M * V = S and pivots on a minimal-absolute-value entry, breaking
ties by smallest (row, col), so results are deterministic.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional, Sequence

from .complex_core import DeltaComplex, NotConnectedError, connected_components

__all__ = [
    "IntegerMatrix",
    "SmithForm",
    "HomologyGroup",
    "DimensionOutOfRangeError",
    "boundary_matrix",
    "smith_normal_form",
    "homology",
    "cohomology",
    "has_connected_double_cover",
]


class DimensionOutOfRangeError(ValueError):
    pass


class IntegerMatrix:
    """Immutable dense integer matrix.  Entries are Python ints."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable[int]], rows: Optional[int] = None, cols: Optional[int] = None):
        data = tuple(tuple(int(v) for v in row) for row in entries)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise ValueError("ragged rows")
            self.rows = len(data)
            self.cols = width
        else:
            self.rows = 0
            self.cols = cols or 0
        if rows is not None and rows != self.rows:
            raise ValueError("row count mismatch")
        if cols is not None and cols != self.cols:
            raise ValueError("column count mismatch")
        self.entries = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls([[0] * cols for _ in range(rows)], rows=rows, cols=cols)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, IntegerMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        return f"IntegerMatrix({self.rows}x{self.cols})"

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            rows=self.cols,
            cols=self.rows,
        )

    def mul(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        ot = other.transpose().entries
        return IntegerMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in ot] for row in self.entries],
            rows=self.rows,
            cols=other.cols,
        )

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.entries for v in row)

    def determinant(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant needs a square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithForm:
    """U * M * V = S with U, V unimodular and S diagonal, d_i | d_{i+1}."""

    u: IntegerMatrix
    s: IntegerMatrix
    v: IntegerMatrix
    invariant_factors: tuple[int, ...]

    def verify(self, m: IntegerMatrix) -> bool:
        if self.u.mul(m).mul(self.v) != self.s:
            return False
        if abs(self.u.determinant()) != 1 or abs(self.v.determinant()) != 1:
            return False
        d = self.invariant_factors
        if any(x <= 0 for x in d):
            return False
        if any(d[i + 1] % d[i] for i in range(len(d) - 1)):
            return False
        for i in range(self.s.rows):
            for j in range(self.s.cols):
                want = d[i] if i == j and i < len(d) else 0
                if self.s[i, j] != want:
                    return False
        return True


def _pivot(a: list[list[int]], t: int, m: int, n: int) -> Optional[tuple[int, int]]:
    # minimal |entry| in the active block, ties broken by smallest (row, col)
    best: Optional[tuple[int, int, int]] = None
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            v = row[j]
            if v:
                key = abs(v)
                if best is None or key < best[0]:
                    best = (key, i, j)
                    if key == 1:
                        return i, j
    if best is None:
        return None
    return best[1], best[2]


def _snf_diagonalize(a: list[list[int]], u: Optional[list[list[int]]], v: Optional[list[list[int]]]) -> int:
    """In-place diagonalization; returns the number of nonzero pivots."""
    m, n = len(a), len(a[0]) if a else 0
    t = 0
    while t < min(m, n):
        pv = _pivot(a, t, m, n)
        if pv is None:
            break
        pi, pj = pv
        if pi != t:
            a[t], a[pi] = a[pi], a[t]
            if u is not None:
                u[t], u[pi] = u[pi], u[t]
        if pj != t:
            for row in a:
                row[t], row[pj] = row[pj], row[t]
            if v is not None:
                for row in v:
                    row[t], row[pj] = row[pj], row[t]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if u is not None:
                u[t] = [-x for x in u[t]]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                x = a[i][t]
                if x:
                    q = x // p
                    if q:
                        at = a[t]
                        a[i] = [y - q * z for y, z in zip(a[i], at)]
                        if u is not None:
                            ut = u[t]
                            u[i] = [y - q * z for y, z in zip(u[i], ut)]
                    if a[i][t]:
                        # remainder is smaller than the pivot: promote it
                        a[t], a[i] = a[i], a[t]
                        if u is not None:
                            u[t], u[i] = u[i], u[t]
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, n):
                x = a[t][j]
                if x:
                    q = x // p
                    if q:
                        for row in a:
                            row[j] -= q * row[t]
                        if v is not None:
                            for row in v:
                                row[j] -= q * row[t]
                    if a[t][j]:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
                        if v is not None:
                            for row in v:
                                row[t], row[j] = row[j], row[t]
                        dirty = True
                        break
            if dirty:
                continue
            # cross is clear; make the pivot divide the rest of the block
            p = a[t][t]
            stained = False
            for i in range(t + 1, m):
                row = a[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        at = a[t]
                        a[t] = [y + z for y, z in zip(at, row)]
                        if u is not None:
                            u[t] = [y + z for y, z in zip(u[t], u[i])]
                        stained = True
                        break
                if stained:
                    break
            if not stained:
                break
        t += 1
    return t


def _chain_fix(a: list[list[int]], u: Optional[list[list[int]]], v: Optional[list[list[int]]], r: int) -> None:
    # enforce d_i | d_{i+1} on the diagonal with explicit unimodular blocks
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            x, y = a[i][i], a[i + 1][i + 1]
            if y % x == 0:
                continue
            changed = True
            g = gcd(x, y)
            lo, hi = g, x * y // g
            # sigma*x + tau*y = g
            sigma, tau = _bezout(x, y)
            # U2 = [[sigma, tau], [-y//g, x//g]], V2 = [[1, -tau*y//g], [1, sigma*x//g]]
            if u is not None:
                ui, uj = u[i], u[i + 1]
                u[i] = [sigma * p + tau * q for p, q in zip(ui, uj)]
                u[i + 1] = [(-y // g) * p + (x // g) * q for p, q in zip(ui, uj)]
            if v is not None:
                c1 = -tau * y // g
                c2 = sigma * x // g
                for row in v:
                    p, q = row[i], row[i + 1]
                    row[i] = p + q
                    row[i + 1] = c1 * p + c2 * q
            a[i][i], a[i + 1][i + 1] = lo, hi


def _bezout(x: int, y: int) -> tuple[int, int]:
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


def smith_normal_form(m: IntegerMatrix, *, verify: Optional[bool] = None) -> SmithForm:
    """Smith normal form with transforms.

    ``verify`` controls the exact re-check U*M*V == S and unimodularity;
    by default it runs in debug builds on matrices small enough to
    re-multiply cheaply.  Tests verify explicitly at every size they use.
    """
    a = [list(r) for r in m.entries]
    u = [[1 if i == j else 0 for j in range(m.rows)] for i in range(m.rows)]
    v = [[1 if i == j else 0 for j in range(m.cols)] for i in range(m.cols)]
    if not a or m.cols == 0:
        form = SmithForm(
            IntegerMatrix.identity(m.rows), IntegerMatrix.zeros(m.rows, m.cols), IntegerMatrix.identity(m.cols), ()
        )
        return form
    r = _snf_diagonalize(a, u, v)
    _chain_fix(a, u, v, r)
    factors = tuple(a[i][i] for i in range(r))
    form = SmithForm(IntegerMatrix(u), IntegerMatrix(a), IntegerMatrix(v), factors)
    if verify is None:
        verify = __debug__ and max(m.rows, m.cols) <= 48
    if verify and not form.verify(m):
        raise AssertionError("Smith normal form failed self-verification")
    return form


@functools.lru_cache(maxsize=None)
def _invariant_factors(m: IntegerMatrix) -> tuple[int, ...]:
    # fast path without transform bookkeeping, for homology ranks/torsion
    a = [list(r) for r in m.entries]
    if not a or m.cols == 0:
        return ()
    r = _snf_diagonalize(a, None, None)
    _chain_fix(a, None, None, r)
    return tuple(a[i][i] for i in range(r))


@functools.lru_cache(maxsize=None)
def _rank_mod_p(m: IntegerMatrix, p: int) -> int:
    a = [[v % p for v in row] for row in m.entries]
    rows, cols = m.rows, m.cols
    rank = 0
    col = 0
    for col in range(cols):
        piv = None
        for i in range(rank, rows):
            if a[i][col]:
                piv = i
                break
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][col], p - 2, p) if p > 2 else a[rank][col]
        a[rank] = [(v * inv) % p for v in a[rank]]
        for i in range(rows):
            if i != rank and a[i][col]:
                f = a[i][col]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


@dataclass(frozen=True)
class HomologyGroup:
    """A finitely generated group: Z^free_rank + sum of Z/d for d in torsion.

    ``ring`` is "Z", "Q" or "Fp"; ``p`` is set only for prime fields.
    Over a field, free_rank is the vector-space dimension and torsion is
    empty.  Torsion factors are > 1 and each divides the next.
    """

    ring: str
    free_rank: int
    torsion: tuple[int, ...] = ()
    p: Optional[int] = None

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def to_dict(self) -> dict:
        out: dict = {"ring": self.ring, "free_rank": self.free_rank, "torsion": list(self.torsion)}
        if self.p is not None:
            out["p"] = self.p
        return out


@functools.lru_cache(maxsize=None)
def boundary_matrix(x: DeltaComplex, k: int) -> IntegerMatrix:
    """The k-th boundary operator as a matrix.

    Rows are (k-1)-cells, columns k-cells, both sorted by id.  The i-th
    facet contributes (-1)^i, and contributions accumulate when a facet
    repeats, so the minimal circle's edge has boundary 0.
    """
    if k < 1 or k > x.dimension:
        raise DimensionOutOfRangeError(f"k={k} outside 1..{x.dimension}")
    rows = x.ids_of_dim(k - 1)
    cols = x.ids_of_dim(k)
    row_index = {cid: i for i, cid in enumerate(rows)}
    entries = [[0] * len(cols) for _ in rows]
    for j, cid in enumerate(cols):
        for i, f in enumerate(x.cell(cid).facets):
            entries[row_index[f]][j] += (-1) ** i
    return IntegerMatrix(entries, rows=len(rows), cols=len(cols))


def _rank_z(x: DeltaComplex, k: int) -> int:
    if k < 1 or k > x.dimension:
        return 0
    return len([d for d in _invariant_factors(boundary_matrix(x, k)) if d])


_VALID_RINGS = ("Z", "Q", "Fp")


def _check_ring(ring: str, p: Optional[int]) -> None:
    if ring not in _VALID_RINGS:
        raise ValueError(f"ring must be one of {_VALID_RINGS}")
    if ring == "Fp":
        if p is None or p < 2:
            raise ValueError("prime field needs p >= 2")
        for d in range(2, int(p**0.5) + 1):
            if p % d == 0:
                raise ValueError(f"p={p} is not prime")
    elif p is not None:
        raise ValueError("p only makes sense with ring='Fp'")


def homology(x: DeltaComplex, k: int, ring: str = "Z", p: Optional[int] = None) -> HomologyGroup:
    """H_k(X) = ker d_k / im d_{k+1} over the chosen coefficients.

    Degrees outside 0..dimension give the zero group.  Over Z the free
    rank is n_k - rank d_k - rank d_{k+1} and the torsion is the set of
    invariant factors of d_{k+1} exceeding 1.
    """
    _check_ring(ring, p)
    n_k = len(x.ids_of_dim(k)) if k >= 0 else 0
    if n_k == 0:
        return HomologyGroup(ring, 0, (), p)
    if ring == "Fp":
        assert p is not None
        rk = _rank_mod_p(boundary_matrix(x, k), p) if 1 <= k <= x.dimension else 0
        rk1 = _rank_mod_p(boundary_matrix(x, k + 1), p) if k + 1 <= x.dimension else 0
        return HomologyGroup(ring, n_k - rk - rk1, (), p)
    rk = _rank_z(x, k)
    rk1 = _rank_z(x, k + 1)
    free = n_k - rk - rk1
    if ring == "Q":
        return HomologyGroup(ring, free)
    torsion = ()
    if k + 1 <= x.dimension:
        torsion = tuple(d for d in _invariant_factors(boundary_matrix(x, k + 1)) if d > 1)
    return HomologyGroup(ring, free, torsion)


def cohomology(x: DeltaComplex, k: int, ring: str = "Z", p: Optional[int] = None) -> HomologyGroup:
    """H^k(X) computed from the transposed boundary matrices.

    The cochain differential in degree k is the transpose of d_{k+1}.
    This is computed directly (a genuinely independent calculation), not
    derived from homology through universal coefficients, so agreement
    between the two is a meaningful cross-check.
    """
    _check_ring(ring, p)
    n_k = len(x.ids_of_dim(k)) if k >= 0 else 0
    if n_k == 0:
        return HomologyGroup(ring, 0, (), p)
    up = boundary_matrix(x, k + 1).transpose() if k + 1 <= x.dimension else None
    down = boundary_matrix(x, k).transpose() if 1 <= k <= x.dimension else None
    if ring == "Fp":
        assert p is not None
        r_up = _rank_mod_p(up, p) if up is not None else 0
        r_down = _rank_mod_p(down, p) if down is not None else 0
        return HomologyGroup(ring, n_k - r_up - r_down, (), p)
    r_up = len([d for d in _invariant_factors(up) if d]) if up is not None else 0
    down_factors = _invariant_factors(down) if down is not None else ()
    r_down = len([d for d in down_factors if d])
    free = n_k - r_up - r_down
    if ring == "Q":
        return HomologyGroup(ring, free)
    torsion = tuple(d for d in down_factors if d > 1)
    return HomologyGroup(ring, free, torsion)


def has_connected_double_cover(x: DeltaComplex) -> bool:
    """Whether a connected complex admits a connected double cover.

    Connected double covers correspond to index-2 subgroups of the
    edge-path group, equivalently to nonzero classes in H^1 with mod-2
    coefficients, so the test is H^1(X; F_2) != 0.
    """
    if len(connected_components(x)) != 1:
        raise NotConnectedError("double-cover test needs a connected complex")
    return cohomology(x, 1, "Fp", p=2).free_rank > 0
