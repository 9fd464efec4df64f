"""Linearized Reed-Solomon codes over F_{q^m}.

Block i of the generator evaluates the powers of the twisted operator
D_a(b) = sigma(b) a with a = gamma^(i-1) at a prefix of a fixed basis of
F_{q^m} over F_q.  These codes are MSRD for the partition N = r_1+...+r_g
whenever g <= q - 1 and every r_i <= m.
"""

from __future__ import annotations

import functools
from typing import Sequence

from . import linalg
from .errors import BadDistribution, InsufficientRank, LengthMismatch, ProfileInvalid
from .gf import FieldTower, GF2m, OrderedBasis
from .sumrank import SumRankPartition


def operator_eval(F: GF2m, a: int, i: int, b: int, base: int) -> int:
    """D_a^i(b) = sigma^i(b) * N_i(a), sigma the 2^base-Frobenius of F."""
    return F.mul(F.frobenius(b, base, i), F.norm(a, i, base))


def operator_rows(F: GF2m, a: int, betas: Sequence[int], k: int, base: int) -> list[list[int]]:
    """Rows D_a^0(betas), ..., D_a^{k-1}(betas), built by repeated application."""
    rows = []
    cur = list(betas)
    for _ in range(k):
        rows.append(cur)
        cur = [F.mul(F.frobenius(b, base), a) for b in cur]
    return rows


class LinRSCode:
    """k-dimensional linearized Reed-Solomon code for the partition ``sizes``.

    ``basis`` is an ordered basis of F_{q^m} over F_q; ``gamma`` defaults to
    the field's primitive element.
    """

    def __init__(self, basis: OrderedBasis, sizes: Sequence[int], k: int, gamma: int | None = None):
        self.basis = basis
        self.sizes = tuple(sizes)
        self.k = k
        F = basis.field
        q = 1 << basis.sub
        if not 1 <= len(self.sizes) <= q - 1:
            raise ProfileInvalid(f"need 1 <= g <= q-1, got g={len(self.sizes)}, q={q}")
        if any(not 1 <= r <= basis.m for r in self.sizes):
            raise ProfileInvalid(f"every r_i must lie in [1, m={basis.m}]")
        if not 0 <= k <= self.N:
            raise ProfileInvalid(f"need 0 <= k <= N={self.N}")
        self.gamma = F.generator if gamma is None else gamma

    def __repr__(self) -> str:
        return f"LinRSCode(q=2^{self.basis.sub}, m={self.basis.m}, sizes={self.sizes}, k={self.k})"

    @property
    def field(self) -> GF2m:
        return self.basis.field

    @property
    def tower(self) -> FieldTower:
        return self.basis.tower

    @property
    def N(self) -> int:
        return sum(self.sizes)

    @property
    def partition(self) -> SumRankPartition:
        return SumRankPartition(self.basis, self.sizes)

    @functools.cached_property
    def generator(self) -> list[list[int]]:
        F = self.field
        blocks = []
        a = 1
        for r in self.sizes:
            blocks.append(operator_rows(F, a, self.basis.elements[:r], self.k, self.basis.sub))
            a = F.mul(a, self.gamma)
        return [sum((blk[j] for blk in blocks), []) for j in range(self.k)]

    def systematic_generator(self, distribution: Sequence[int]) -> list[list[int]]:
        """Generator whose first k_i columns of block i carry the message."""
        return linalg.matmul(self.field, self._systematic_transform(distribution), self.generator)

    def _systematic_transform(self, distribution: Sequence[int]) -> list[list[int]]:
        cols = systematic_positions(self.sizes, self.k, distribution)
        return linalg.inverse(self.field, linalg.columns(self.generator, cols))

    def encode(self, message: Sequence[int]) -> list[int]:
        if len(message) != self.k:
            raise LengthMismatch(f"message of length {len(message)} for k={self.k}")
        return linalg.vecmat(self.field, message, self.generator)

    def erasure_decode(self, folded: Sequence[Sequence[Sequence[int]]], received: Sequence[int]) -> list[int]:
        return erasure_decode(self.field, self.generator, self.sizes, folded, received, self.basis)

    def dual_parity_check(self) -> list[list[int]]:
        """(N-k) x N matrix H with G H^T = 0."""
        return linalg.nullspace(self.field, self.generator, self.N)


def systematic_positions(sizes: Sequence[int], k: int, distribution: Sequence[int]) -> list[int]:
    dist = list(distribution)
    if len(dist) != len(sizes) or sum(dist) != k or any(not 0 <= d <= r for d, r in zip(dist, sizes)):
        raise BadDistribution(f"distribution {dist} must have 0 <= k_i <= r_i and sum to k={k}")
    cols = []
    off = 0
    for d, r in zip(dist, sizes):
        cols.extend(range(off, off + d))
        off += r
    return cols


def default_distribution(sizes: Sequence[int], k: int) -> list[int]:
    """Fill groups in order, as in the usual layout with global parities last."""
    out = []
    left = k
    for r in sizes:
        out.append(min(r, left))
        left -= out[-1]
    return out


def select_folded_columns(
    folded: Sequence[Sequence[Sequence[int]]], basis_field: GF2m
) -> list[list[int]]:
    """Per group, the first rank(A_i|R_i) independent columns (left to right)."""
    out = []
    for Ai in folded:
        if not Ai or not Ai[0]:
            out.append([])
            continue
        out.append(linalg.independent_columns(basis_field, Ai, range(len(Ai[0]))))
    return out


def erasure_decoder(
    F: GF2m,
    G: Sequence[Sequence[int]],
    sizes: Sequence[int],
    folded: Sequence[Sequence[Sequence[int]]],
    basis: OrderedBasis,
) -> tuple[list[tuple[int, int]], list[list[int]]]:
    """Linear decoder for received = c_out * diag(folded).

    Returns the (group, column) coordinates actually read and a k x k matrix
    M with message = received_at_those_coordinates * M.
    """
    k = len(G)
    if len(folded) != len(sizes):
        raise LengthMismatch("one folded block per group required")
    base = basis.base
    picks = select_folded_columns(folded, base)
    if sum(len(p) for p in picks) < k:
        raise InsufficientRank(f"sum of survivor ranks {sum(len(p) for p in picks)} < k={k}")
    if k == 0:
        return [], []
    tower = basis.tower
    off = 0
    cols: list[list[int]] = []  # columns of G * A|_S
    coords: list[tuple[int, int]] = []
    for i, (Ai, r) in enumerate(zip(folded, sizes)):
        Gi = [row[off : off + r] for row in G]
        for j in picks[i]:
            a_col = [tower.embed(Ai[t][j], basis.sub, basis.ext) for t in range(r)]
            cols.append([F.dot(grow, a_col) for grow in Gi])
            coords.append((i, j))
        off += r
    M = linalg.transpose(cols)  # k x |S|
    chosen = linalg.independent_columns(F, M, range(len(cols)), limit=k)
    if len(chosen) < k:
        raise InsufficientRank("survivors do not determine the message for this outer code")
    square = linalg.columns(M, chosen)
    return [coords[c] for c in chosen], linalg.inverse(F, square)


def erasure_decode(
    F: GF2m,
    G: Sequence[Sequence[int]],
    sizes: Sequence[int],
    folded: Sequence[Sequence[Sequence[int]]],
    received: Sequence[int],
    basis: OrderedBasis,
) -> list[int]:
    """Recover the message from c_out * diag(A_1|R_1, ..., A_g|R_g).

    ``received`` is that product, concatenated group by group.
    """
    widths = [len(Ai[0]) if Ai and Ai[0] else 0 for Ai in folded]
    if len(received) != sum(widths):
        raise LengthMismatch("received vector does not match the folded matrix")
    coords, M = erasure_decoder(F, G, sizes, folded, basis)
    if not coords:
        return []
    starts = [0]
    for w in widths:
        starts.append(starts[-1] + w)
    y = [received[starts[i] + j] for i, j in coords]
    return linalg.vecmat(F, y, M)


class NestedFamily:
    """Nested linearized Reed-Solomon generators over the full partition (q-1) x m.

    Row j of every block is D_{gamma^{i-1}}^j applied to the whole basis, so
    G_k is the first k rows of G_{(q-1)m}; the full matrix is built once and
    reused.
    """

    def __init__(self, basis: OrderedBasis, gamma: int | None = None):
        self.basis = basis
        self.q = 1 << basis.sub
        self.m = basis.m
        self.gamma = basis.field.generator if gamma is None else gamma
        self.blocks = self.q - 1
        self.N0 = self.blocks * self.m
        self._rows: list[list[list[int]]] = [[] for _ in range(self.blocks)]

    @property
    def field(self) -> GF2m:
        return self.basis.field

    def _ensure(self, k: int) -> None:
        if k > self.N0:
            raise ValueError(f"nested family has at most {self.N0} rows")
        F = self.field
        have = len(self._rows[0])
        if have >= k:
            return
        # materialise the whole family once
        a = 1
        for i in range(self.blocks):
            self._rows[i] = operator_rows(F, a, self.basis.elements, self.N0, self.basis.sub)
            a = F.mul(a, self.gamma)

    def block(self, k: int, i: int, cols: Sequence[int] | range | None = None) -> list[list[int]]:
        """Rows 0..k-1 of block i (0-based), restricted to the given columns."""
        self._ensure(k)
        rows = self._rows[i][:k]
        if cols is None:
            return [list(r) for r in rows]
        return [[r[c] for c in cols] for r in rows]

    def full_generator(self, k: int) -> list[list[int]]:
        self._ensure(k)
        return [sum((self._rows[i][j] for i in range(self.blocks)), []) for j in range(k)]

    def generator(self, k: int, sizes: Sequence[int]) -> list[list[int]]:
        """G_k restricted to the first r_i columns of block i."""
        if len(sizes) > self.blocks or any(not 1 <= r <= self.m for r in sizes):
            raise ProfileInvalid("sizes outside the nested family's range")
        self._ensure(k)
        parts = [self.block(k, i, range(r)) for i, r in enumerate(sizes)]
        return [sum((p[j] for p in parts), []) for j in range(k)]

    def code(self, sizes: Sequence[int], k: int) -> LinRSCode:
        return LinRSCode(self.basis, sizes, k, self.gamma)


def nested_family(q_degree: int, m: int, tower: FieldTower | None = None) -> NestedFamily:
    tower = tower or FieldTower(q_degree * m, [q_degree])
    return NestedFamily(tower.polynomial_basis(q_degree, q_degree * m))


def make_linrs(q_degree: int, m: int, sizes: Sequence[int], k: int, tower: FieldTower | None = None) -> LinRSCode:
    """Convenience constructor with the canonical polynomial basis."""
    tower = tower or FieldTower(q_degree * m, [q_degree])
    return LinRSCode(tower.polynomial_basis(q_degree, q_degree * m), sizes, k)


def classical_rs_generator(F: GF2m, points: Sequence[int], k: int) -> list[list[int]]:
    """Vandermonde rows (x^j) for j = 0..k-1."""
    return [[F.pow(x, j) if x or j == 0 else 0 for x in points] for j in range(k)]
