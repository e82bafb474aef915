"""Exact integer linear algebra.

Column-style Hermite normal form ``H = M @ U`` with ``U`` unimodular, rank
over the rationals by fraction-free elimination, and the complete integer
solution set of ``A x = b`` as an affine lattice.  Everything is Python
``int``; there is no floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

__all__ = [
    "IntMatrix",
    "AffineLattice",
    "xgcd",
    "hermite_normal_form",
    "is_hermite_normal_form",
    "rank_rational",
    "determinant",
    "solve_diophantine",
]


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("inconsistent matrix dimensions")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        cols = [other.column(j) for j in range(other.cols)]
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.entries),
        )

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __str__(self) -> str:
        if not self.rows:
            return f"[] (0x{self.cols})"
        width = max(len(str(x)) for r in self.entries for x in r) if self.cols else 0
        return "\n".join("[" + " ".join(str(x).rjust(width) for x in r) + "]" for r in self.entries)


@dataclass(frozen=True)
class AffineLattice:
    """The set ``{particular + sum_j t_j * basis[j] : t in Z^k}``."""

    dimension: int
    particular: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]

    def point(self, params: Sequence[int]) -> tuple[int, ...]:
        if len(params) != len(self.basis):
            raise ValueError("wrong number of lattice parameters")
        out = list(self.particular)
        for t, v in zip(params, self.basis):
            if t:
                for i, x in enumerate(v):
                    out[i] += t * x
        return tuple(out)

    def __contains__(self, x: Sequence[int]) -> bool:
        if len(x) != self.dimension:
            return False
        diff = [a - b for a, b in zip(x, self.particular)]
        if not self.basis:
            return not any(diff)
        # basis columns are independent, so the coordinates are unique when they exist
        B = IntMatrix.from_rows([[v[i] for v in self.basis] for i in range(self.dimension)])
        return solve_diophantine(B, diff) is not None


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = gcd(a, b) >= 0`` and ``s*a + t*b = g``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def _col_combine(M: list[list[int]], j: int, k: int, a: int, b: int, c: int, d: int) -> None:
    """Replace columns (j, k) by (a*col_j + b*col_k, c*col_j + d*col_k)."""
    for row in M:
        x, y = row[j], row[k]
        row[j] = a * x + b * y
        row[k] = c * x + d * y


def hermite_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Column-style HNF.

    Returns ``(H, U)`` with ``H = M @ U`` and ``U`` unimodular.  ``H`` is in
    column echelon form: each pivot is positive, entries of a pivot row to
    the left of the pivot lie in ``[0, pivot)``, and zero columns come last.
    """
    m, n = M.rows, M.cols
    H = [list(r) for r in M.entries]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    k = 0
    for i in range(m):
        if k == n:
            break
        for j in range(k + 1, n):
            b = H[i][j]
            if b == 0:
                continue
            a = H[i][k]
            g, s, t = xgcd(a, b)
            p, q = a // g, b // g
            # [[s, -q], [t, p]] has determinant s*p + t*q = 1
            _col_combine(H, k, j, s, t, -q, p)
            _col_combine(U, k, j, s, t, -q, p)
        piv = H[i][k]
        if piv == 0:
            continue
        if piv < 0:
            for R in (H, U):
                for row in R:
                    row[k] = -row[k]
            piv = -piv
        for j in range(k):
            q = H[i][j] // piv
            if q:
                for R in (H, U):
                    for row in R:
                        row[j] -= q * row[k]
        k += 1
    return IntMatrix.from_rows(H, n), IntMatrix.from_rows(U, n)


def is_hermite_normal_form(H: IntMatrix) -> bool:
    """Shape predicates of the column-style HNF produced above."""
    k = 0
    for i in range(H.rows):
        row = H.entries[i]
        if any(row[j] for j in range(k + 1, H.cols)):
            return False
        if k < H.cols and row[k] != 0:
            piv = row[k]
            if piv <= 0 or any(not 0 <= row[j] < piv for j in range(k)):
                return False
            k += 1
    return all(H[i, j] == 0 for i in range(H.rows) for j in range(k, H.cols))


def _echelon_rank(rows: list[list[int]]) -> int:
    rows = [r[:] for r in rows if any(r)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank]
        for i in range(rank + 1, len(rows)):
            f = rows[i][c]
            if f:
                r = [p[c] * x - f * y for x, y in zip(rows[i], p)]
                g = 0
                for x in r:
                    g = gcd(g, x)
                rows[i] = [x // g for x in r] if g > 1 else r
        rank += 1
        if rank == len(rows):
            break
    return rank


def rank_rational(M: IntMatrix | Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction-free elimination (rows kept primitive)."""
    rows = M.tolist() if isinstance(M, IntMatrix) else [list(r) for r in M]
    return _echelon_rank(rows)


def determinant(M: IntMatrix) -> int:
    """Exact determinant by Bareiss elimination."""
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    A = M.tolist()
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


def solve_diophantine(A: IntMatrix, b: Sequence[int]) -> AffineLattice | None:
    """All integer solutions of ``A x = b``, or ``None`` when there are none.

    >>> L = solve_diophantine(IntMatrix.from_rows([[1, 1], [1, -1]]), [2, 0])
    >>> L.particular, L.basis
    ((1, 1), ())
    """
    if len(b) != A.rows:
        raise ValueError("right-hand side has the wrong length")
    n = A.cols
    H, U = hermite_normal_form(A)
    y = [0] * n
    k = 0
    for i in range(A.rows):
        row = H.entries[i]
        acc = sum(row[j] * y[j] for j in range(k))
        if k < n and row[k] != 0:
            q, r = divmod(b[i] - acc, row[k])
            if r:
                return None
            y[k] = q
            k += 1
        elif acc != b[i]:
            return None
    particular = [sum(U[i, j] * y[j] for j in range(k)) for i in range(n)]
    if k == n:
        return AffineLattice(n, tuple(particular), ())
    # canonical representative: kernel basis in HNF, particular reduced against its pivots
    K, _ = hermite_normal_form(IntMatrix.from_rows([U.entries[i][k:] for i in range(n)]))
    basis = [K.column(j) for j in range(K.cols)]
    row = 0
    for v in basis:
        while v[row] == 0:
            row += 1
        q = particular[row] // v[row]
        if q:
            particular = [p - q * x for p, x in zip(particular, v)]
        row += 1
    return AffineLattice(n, tuple(particular), tuple(basis))
