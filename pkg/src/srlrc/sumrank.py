"""Sum-rank weights and brute-force distance oracles.

The partition splits a length-N vector over F_{q^m} into g blocks; the
weight of a block is the rank over F_q of its matrix representation, i.e.
the F_q-dimension of the span of its entries.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import linalg
from .errors import LengthMismatch, NotInvertibleBlock, TooLarge
from .gf import GF2m, OrderedBasis, gf

DEFAULT_CAP = 1 << 20


@dataclass(frozen=True)
class SumRankPartition:
    basis: OrderedBasis
    sizes: tuple[int, ...]
    _rank_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(self.sizes))
        if not self.sizes or any(r < 1 for r in self.sizes):
            raise ValueError("partition sizes must be positive")

    @property
    def N(self) -> int:
        return sum(self.sizes)

    @property
    def g(self) -> int:
        return len(self.sizes)

    @property
    def m(self) -> int:
        return self.basis.m

    @property
    def field(self) -> GF2m:
        return self.basis.field

    @property
    def base(self) -> GF2m:
        return self.basis.base

    def offsets(self) -> list[int]:
        out = [0]
        for r in self.sizes:
            out.append(out[-1] + r)
        return out

    def blocks(self, c: Sequence[int]) -> list[tuple[int, ...]]:
        if len(c) != self.N:
            raise LengthMismatch(f"vector of length {len(c)} for partition of {self.N}")
        off = self.offsets()
        return [tuple(c[off[i] : off[i + 1]]) for i in range(self.g)]

    def refine(self, parts: Sequence[Sequence[int]]) -> "SumRankPartition":
        """Split block i into parts[i] (which must sum to sizes[i])."""
        if len(parts) != self.g or any(sum(p) != r for p, r in zip(parts, self.sizes)):
            raise ValueError("refinement must split each block exactly")
        return SumRankPartition(self.basis, tuple(x for p in parts for x in p))

    def block_rank(self, block: Sequence[int]) -> int:
        key = tuple(block)
        hit = self._rank_cache.get(key)
        if hit is None:
            hit = _span_dimension(self.basis, key)
            if len(self._rank_cache) < 1 << 18:
                self._rank_cache[key] = hit
        return hit


def _span_dimension(basis: OrderedBasis, elems: Sequence[int]) -> int:
    nz = [x for x in elems if x]
    if len(nz) <= 1:
        return len(nz)
    if basis.sub == 1:
        # over F_2 the span is just the xor span of the bit patterns
        rows: list[int] = []
        for v in nz:
            for r in rows:
                v = min(v, v ^ r)
            if v:
                rows.append(v)
        return len(rows)
    cols = [basis.coordinates(x) for x in nz]
    return linalg.rank(basis.base, cols)


def sum_rank_weight(c: Sequence[int], p: SumRankPartition) -> int:
    return sum(p.block_rank(b) for b in p.blocks(c))


def sum_rank_distance(c: Sequence[int], d: Sequence[int], p: SumRankPartition) -> int:
    if len(c) != len(d):
        raise LengthMismatch("vectors of different length")
    return sum_rank_weight([a ^ b for a, b in zip(c, d)], p)


def rank_weight_via_matrix(c: Sequence[int], p: SumRankPartition) -> int:
    """Reference weight: rank of each block's matrix representation."""
    return sum(linalg.rank(p.base, p.basis.matrix_rep(b)) for b in p.blocks(c))


def hamming_weight(c: Iterable[int]) -> int:
    return sum(1 for x in c if x)


# ---------------------------------------------------------------------------
# enumeration of linear codes


def projective_messages(F: GF2m, k: int) -> Iterator[tuple[int, ...]]:
    """Nonzero vectors of F^k whose first nonzero entry is 1."""
    q = F.order
    for lead in range(k):
        for tail in itertools.product(range(q), repeat=k - lead - 1):
            yield (0,) * lead + (1,) + tail


def all_messages(F: GF2m, k: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(F.order), repeat=k)


def codewords(F: GF2m, G: Sequence[Sequence[int]], projective: bool = False) -> Iterator[list[int]]:
    k = len(G)
    n = len(G[0]) if k else 0
    if k == 0:
        if not projective:
            yield [0] * n
        return
    it = projective_messages(F, k) if projective else all_messages(F, k)
    # reuse the partial sum over the leading coordinates
    for msg in it:
        acc = [0] * n
        for a, row in zip(msg, G):
            if a:
                acc = F.axpy(a, row, acc)
        yield acc


def _check_cap(F: GF2m, k: int, cap: int) -> None:
    if F.order ** k > cap:
        raise TooLarge(f"{F.order}^{k} codewords exceed the enumeration cap {cap}")


def min_distance(G: Sequence[Sequence[int]], p: SumRankPartition, cap: int = DEFAULT_CAP) -> int:
    """Minimum sum-rank distance of the linear code generated by G.

    Scaling by a nonzero scalar of F_{q^m} preserves sum-rank weight, so
    only projective representatives are enumerated.  The zero code reports
    N + 1.
    """
    F = p.field
    k = len(G)
    if k and len(G[0]) != p.N:
        raise LengthMismatch("generator length does not match the partition")
    _check_cap(F, k, cap)
    best = p.N + 1
    off = p.offsets()
    spans = list(zip(off, off[1:]))
    br = p.block_rank
    for c in codewords(F, G, projective=True):
        w = 0
        for a, b in spans:
            w += br(c[a:b])
            if w >= best:
                break
        else:
            best = w
            if best == 1:
                break
    return best


def min_distance_of_set(code: Iterable[Sequence[int]], p: SumRankPartition) -> int:
    """Minimum sum-rank distance over all pairs of an arbitrary code."""
    words = [tuple(c) for c in code]
    if len(set(words)) < 2:
        raise ValueError("a code needs at least two distinct codewords")
    best = p.N + 1
    for c, d in itertools.combinations(set(words), 2):
        best = min(best, sum_rank_distance(c, d, p))
    return best


def min_hamming_distance(F: GF2m, G: Sequence[Sequence[int]], cap: int = DEFAULT_CAP) -> int:
    k = len(G)
    n = len(G[0]) if k else 0
    _check_cap(F, k, cap)
    best = n + 1
    for c in codewords(F, G, projective=True):
        best = min(best, hamming_weight(c))
    return best


def sampled_min_distance(G: Sequence[Sequence[int]], p: SumRankPartition, rng, samples: int = 10000) -> int:
    """Minimum weight over random nonzero codewords: an upper bound on d_SR, not exact."""
    F = p.field
    k = len(G)
    best = p.N + 1
    for _ in range(samples):
        msg = [F.random_element(rng) for _ in range(k)]
        if not any(msg):
            continue
        best = min(best, sum_rank_weight(linalg.vecmat(F, msg, G), p))
    return best


def is_msrd(G: Sequence[Sequence[int]], p: SumRankPartition, cap: int = DEFAULT_CAP) -> bool:
    k = linalg.rank(p.field, G) if G else 0
    return min_distance(G, p, cap) == p.N - k + 1


def singleton_holds(size: int, d: int, p: SumRankPartition) -> bool:
    """|C| <= q^{m(N - d + 1)}."""
    return size <= p.base.order ** (p.m * (p.N - d + 1))


def second_singleton_holds(size: int, d: int, p: SumRankPartition) -> bool:
    """Equal-sublength bound |C| <= (q^{N/g})^{gm - d + 1}."""
    if len(set(p.sizes)) != 1:
        raise ValueError("bound needs equal sublengths")
    r = p.sizes[0]
    return size <= (p.base.order ** r) ** (p.g * p.m - d + 1)


# ---------------------------------------------------------------------------
# recoding by block-diagonal invertible matrices


def general_linear_group(F: GF2m, r: int) -> Iterator[list[list[int]]]:
    """All invertible r x r matrices over F, built row by row."""
    q = F.order
    vectors = [list(v) for v in itertools.product(range(q), repeat=r)]

    def extend(rows):
        if len(rows) == r:
            yield [list(x) for x in rows]
            return
        for v in vectors:
            if linalg.rank(F, rows + [v]) == len(rows) + 1:
                yield from extend(rows + [v])

    yield from extend([])


def gl_order(q: int, r: int) -> int:
    out = 1
    for i in range(r):
        out *= q**r - q**i
    return out


def _embedded_blocks(p: SumRankPartition, blocks: Sequence[Sequence[Sequence[int]]]) -> list[list[list[int]]]:
    if len(blocks) != p.g:
        raise LengthMismatch("one block per partition group required")
    out = []
    for Ai, r in zip(blocks, p.sizes):
        if len(Ai) != r or any(len(row) != r for row in Ai):
            raise LengthMismatch("block shapes must match the partition")
        if linalg.rank(p.base, Ai) != r:
            raise NotInvertibleBlock("recoding block is singular")
        out.append(p.basis.tower.embed_matrix(Ai, p.basis.sub, p.basis.ext))
    return out


def hamming_min_after_recoding(
    G: Sequence[Sequence[int]],
    p: SumRankPartition,
    blocks: Sequence[Sequence[Sequence[int]]],
    cap: int = DEFAULT_CAP,
) -> int:
    """d_H(C A) for A = diag(blocks), blocks invertible over the base field."""
    A = linalg.block_diag(_embedded_blocks(p, blocks))
    return min_hamming_distance(p.field, linalg.matmul(p.field, G, A), cap)


def min_hamming_over_recodings(G: Sequence[Sequence[int]], p: SumRankPartition, cap: int = DEFAULT_CAP) -> int:
    """Exact min over ALL invertible block-diagonal A of d_H(C A).

    For a fixed codeword the Hamming weight of c A is a sum of per-block
    terms, so min_A min_c = min_c sum_i min_{A_i} wt_H(c_i A_i).  Every
    A_i in GL(r_i, q) is still enumerated, block by block.
    """
    F = p.field
    tower = p.basis.tower
    groups = {}
    for r in set(p.sizes):
        groups[r] = [tower.embed_matrix(A, p.basis.sub, p.basis.ext) for A in general_linear_group(p.base, r)]

    @functools.lru_cache(maxsize=1 << 16)
    def block_min(block: tuple[int, ...]) -> int:
        if not any(block):
            return 0
        best = len(block)
        for A in groups[len(block)]:
            w = hamming_weight(linalg.vecmat(F, block, A))
            if w < best:
                best = w
                if best == 1:
                    break
        return best

    _check_cap(F, len(G), cap)
    best = p.N + 1
    for c in codewords(F, G, projective=True):
        best = min(best, sum(block_min(b) for b in p.blocks(c)))
    return best


def min_hamming_over_recodings_naive(G: Sequence[Sequence[int]], p: SumRankPartition, cap: int = DEFAULT_CAP) -> int:
    """Same quantity by the literal product over all block choices (tiny instances)."""
    choices = [list(general_linear_group(p.base, r)) for r in p.sizes]
    best = p.N + 1
    for blocks in itertools.product(*choices):
        best = min(best, hamming_min_after_recoding(G, p, blocks, cap))
    return best


def sample_recodings(p: SumRankPartition, rng, samples: int) -> Iterator[list[list[list[int]]]]:
    """Random invertible block choices (rejection sampling)."""
    q = p.base.order
    for _ in range(samples):
        blocks = []
        for r in p.sizes:
            while True:
                A = [[int(rng.integers(q)) for _ in range(r)] for _ in range(r)]
                if linalg.rank(p.base, A) == r:
                    break
            blocks.append(A)
        yield blocks


def partition_for(tower, sub: int, ext: int, sizes: Sequence[int]) -> SumRankPartition:
    return SumRankPartition(tower.polynomial_basis(sub, ext), tuple(sizes))


__all__ = [
    "SumRankPartition",
    "sum_rank_weight",
    "sum_rank_distance",
    "hamming_weight",
    "min_distance",
    "min_distance_of_set",
    "min_hamming_distance",
    "sampled_min_distance",
    "is_msrd",
    "general_linear_group",
    "hamming_min_after_recoding",
    "min_hamming_over_recodings",
    "gf",
]
