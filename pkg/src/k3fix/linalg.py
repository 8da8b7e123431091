"""Exact Gaussian elimination over Q."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def rref(
    rows: Sequence[Sequence], column_order: Sequence[int] | None = None
) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form of an augmented matrix ``[A | b]``.

    Pivots are searched in ``column_order`` (default: left to right) over the
    coefficient columns only; the last column is the right-hand side.
    Returns the nonzero reduced rows and their pivot columns.  A row
    ``0 = c`` with ``c != 0`` is kept, with pivot ``-1``, to signal
    inconsistency.
    """
    mat = [[Fraction(x) for x in row] for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0]) - 1
    order = list(range(ncols)) if column_order is None else list(column_order)
    pivots: list[int] = []
    r = 0
    for col in order:
        pivot_row = next((k for k in range(r, len(mat)) if mat[k][col] != 0), None)
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [x * inv for x in mat[r]]
        for k in range(len(mat)):
            if k != r and mat[k][col] != 0:
                f = mat[k][col]
                mat[k] = [a - f * b for a, b in zip(mat[k], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    out = mat[:r]
    for row in mat[r:]:
        if row[-1] != 0:
            out.append(row)
            pivots.append(-1)
            break
    return out, pivots


def rank(rows: Sequence[Sequence]) -> int:
    """Rank of a plain (non-augmented) matrix."""
    if not rows:
        return 0
    _, piv = rref([list(r) + [0] for r in rows])
    return sum(1 for p in piv if p >= 0)


def solve_integer(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[Fraction]:
    """Unique solution of a nonsingular integer system ``A x = b``.

    Fraction-free (Bareiss) forward elimination keeps every intermediate entry
    an integer minor of ``[A | b]``; only back substitution touches fractions.
    Raises ``ZeroDivisionError`` when ``A`` is singular.
    """
    n = len(matrix)
    a = [list(map(int, row)) + [int(b)] for row, b in zip(matrix, rhs)]
    prev = 1
    for k in range(n):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                raise ZeroDivisionError("singular system")
            a[k], a[swap] = a[swap], a[k]
        pk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n + 1):
                row_i[j] = (row_i[j] * pk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pk
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = a[i][n] - sum(a[i][j] * x[j] for j in range(i + 1, n))
        x[i] = Fraction(s) / a[i][i]
    return x
