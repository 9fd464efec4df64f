"""Dense linear algebra over any binary field.

Matrices are lists of rows of ints; vectors are lists of ints.  Every
function takes the field first.  Pivoting picks the first nonzero entry.
"""

from __future__ import annotations

from typing import Sequence

from .errors import Inconsistent, Singular
from .gf import GF2m

Matrix = list[list[int]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M: Sequence[Sequence[int]], cols: int | None = None) -> Matrix:
    if not M:
        return [[] for _ in range(cols or 0)]
    return [list(c) for c in zip(*M)]


def columns(M: Sequence[Sequence[int]], idx: Sequence[int]) -> Matrix:
    return [[row[j] for j in idx] for row in M]


def block_diag(blocks: Sequence[Sequence[Sequence[int]]]) -> Matrix:
    rows = sum(len(b) for b in blocks)
    cols = sum(len(b[0]) if b else 0 for b in blocks)
    out = zeros(rows, cols)
    r0 = c0 = 0
    for b in blocks:
        h = len(b)
        w = len(b[0]) if h else 0
        for i in range(h):
            out[r0 + i][c0 : c0 + w] = list(b[i])
        r0 += h
        c0 += w
    return out


def matmul(F: GF2m, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    if not A:
        return []
    ncols = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [0] * ncols
        for a, brow in zip(row, B):
            if a:
                acc = F.axpy(a, brow, acc)
        out.append(acc)
    return out


def vecmat(F: GF2m, v: Sequence[int], M: Sequence[Sequence[int]]) -> list[int]:
    """Row vector times matrix."""
    ncols = len(M[0]) if M else 0
    acc = [0] * ncols
    for a, row in zip(v, M):
        if a:
            acc = F.axpy(a, row, acc)
    return acc


def matvec(F: GF2m, M: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [F.dot(row, v) for row in M]


def rref(F: GF2m, M: Sequence[Sequence[int]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    R = [list(r) for r in M]
    if not R:
        return R, []
    nrows, ncols = len(R), len(R[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if R[i][c]), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        piv = R[r][c]
        if piv != 1:
            R[r] = F.scale(F.inv(piv), R[r])
        prow = R[r]
        for i in range(nrows):
            if i != r and R[i][c]:
                R[i] = F.axpy(R[i][c], prow, R[i])
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F: GF2m, M: Sequence[Sequence[int]]) -> int:
    if not M or not M[0]:
        return 0
    # eliminate on the shorter side
    if len(M) > len(M[0]):
        M = transpose(M)
    R = [list(r) for r in M]
    nrows, ncols = len(R), len(R[0])
    rk = 0
    for c in range(ncols):
        p = next((i for i in range(rk, nrows) if R[i][c]), None)
        if p is None:
            continue
        R[rk], R[p] = R[p], R[rk]
        prow = R[rk]
        inv = F.inv(prow[c])
        for i in range(rk + 1, nrows):
            if R[i][c]:
                R[i] = F.axpy(F.mul(R[i][c], inv), prow, R[i])
        rk += 1
        if rk == nrows:
            break
    return rk


def solve(F: GF2m, M: Sequence[Sequence[int]], y: Sequence[int]) -> list[int]:
    """One solution x of M x = y; raises Inconsistent."""
    nrows = len(M)
    ncols = len(M[0]) if nrows else 0
    if len(y) != nrows:
        raise ValueError("right-hand side length mismatch")
    aug = [list(row) + [yi] for row, yi in zip(M, y)]
    R, pivots = rref(F, aug)
    if ncols in pivots:
        raise Inconsistent("system has no solution")
    x = [0] * ncols
    for row, c in zip(R, pivots):
        x[c] = row[ncols]
    return x


def solve_left(F: GF2m, M: Sequence[Sequence[int]], y: Sequence[int]) -> list[int]:
    """One solution x of x M = y."""
    return solve(F, transpose(M, len(y)), y)


def nullspace(F: GF2m, M: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    """Basis (as rows) of the right kernel {x : M x = 0}."""
    if ncols is None:
        ncols = len(M[0]) if M else 0
    if not M:
        return identity(ncols)
    R, pivots = rref(F, M)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, c in zip(R, pivots):
            v[c] = row[f]  # characteristic 2: -a == a
        basis.append(v)
    return basis


def inverse(F: GF2m, M: Sequence[Sequence[int]]) -> Matrix:
    n = len(M)
    if any(len(r) != n for r in M):
        raise Singular("matrix is not square")
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    R, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)):
        raise Singular("matrix is singular")
    return [row[n:] for row in R]


def independent_columns(F: GF2m, M: Sequence[Sequence[int]], candidates: Sequence[int], limit: int | None = None) -> list[int]:
    """Greedy left-to-right choice of linearly independent columns."""
    chosen: list[int] = []
    basis: list[tuple[int, list[int]]] = []  # (pivot index, reduced column)
    for j in candidates:
        if limit is not None and len(chosen) >= limit:
            break
        v = [row[j] for row in M]
        for p, b in basis:
            if v[p]:
                v = F.axpy(F.mul(v[p], F.inv(b[p])), b, v)
        p = next((i for i, x in enumerate(v) if x), None)
        if p is None:
            continue
        basis.append((p, v))
        chosen.append(j)
    return chosen
