"""Exact integer solvability of A x = b by column-style Hermite elimination."""
from __future__ import annotations


def column_echelon(A: list[list[int]]):
    """Unimodular column operations bringing A to lower echelon form.

    Returns (L, U, pivots) with A U = L, L given as a list of columns, and
    pivots[c] the row of the leading entry of column c (c < rank).
    """
    m = len(A)
    n = len(A[0]) if m else 0
    cols = [[int(A[i][j]) for i in range(m)] for j in range(n)]
    ucols = [[int(i == j) for i in range(n)] for j in range(n)]
    pivots = []
    k = 0
    for i in range(m):
        if k == n:
            break
        while True:
            nz = [j for j in range(k, n) if cols[j][i]]
            if not nz:
                break
            p = min(nz, key=lambda j: abs(cols[j][i]))
            cols[k], cols[p] = cols[p], cols[k]
            ucols[k], ucols[p] = ucols[p], ucols[k]
            piv = cols[k][i]
            clean = True
            for j in range(k + 1, n):
                q = cols[j][i] // piv
                if q:
                    cols[j] = [x - q * y for x, y in zip(cols[j], cols[k])]
                    ucols[j] = [x - q * y for x, y in zip(ucols[j], ucols[k])]
                if cols[j][i]:
                    clean = False
            if clean:
                break
        if cols[k][i]:
            pivots.append(i)
            k += 1
    return cols, ucols, pivots


def solve_integer_system(A, b) -> list[int] | None:
    """Some integer x with A x = b, or None when none exists."""
    A = [[int(v) for v in row] for row in A]
    b = [int(v) for v in b]
    if not A:
        return []
    n = len(A[0])
    # trivial rows first: 0 = c
    keep = []
    for row, rhs in zip(A, b):
        if any(row):
            keep.append((row, rhs))
        elif rhs:
            return None
    if not keep:
        return [0] * n
    A = [row for row, _ in keep]
    res = [rhs for _, rhs in keep]
    cols, ucols, pivots = column_echelon(A)
    z = [0] * n
    for c, i in enumerate(pivots):
        p = cols[c][i]
        if res[i] % p:
            return None
        z[c] = res[i] // p
        if z[c]:
            res = [x - z[c] * y for x, y in zip(res, cols[c])]
    if any(res):
        return None
    return [sum(ucols[c][t] * z[c] for c in range(n)) for t in range(n)]
