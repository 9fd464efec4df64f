"""Local codes: one linear code per group, over a small local field.

A local code stores its generator A (r x n) over F_{2^e}.  Group symbols
live in the big field F_{q^m}; repair embeds A into that field first.
"""

from __future__ import annotations

import functools
import itertools
import math
from typing import Sequence

from . import linalg
from .errors import FieldTooSmall, LengthMismatch, NotFullRank, TooLarge, UnrepairableLocally
from .gf import FieldTower, GF2m, gf

MINOR_CAP = 10**6


class LocalCode:
    """Linear [n, r] code over F_{2^e} given by a full-rank generator.

    ``parts`` optionally lists (column range, sub-code) pairs: each range of
    coordinates is itself a codeword of the sub-code, so repair can run on
    that range alone.  Cartesian products and multi-layer codes use this.
    """

    def __init__(self, field_e: int, generator: Sequence[Sequence[int]], parts: Sequence[tuple[range, "LocalCode"]] = (), label: str = ""):
        self.e = field_e
        self.generator = [list(r) for r in generator]
        if not self.generator or not self.generator[0]:
            raise NotFullRank("local generator must be nonempty")
        width = len(self.generator[0])
        if any(len(r) != width for r in self.generator):
            raise LengthMismatch("ragged generator")
        if any(not 0 <= x < (1 << field_e) for r in self.generator for x in r):
            raise ValueError(f"generator entries must lie in F_2^{field_e}")
        if linalg.rank(self.field, self.generator) != len(self.generator):
            raise NotFullRank("local generator is not full rank")
        self.parts = tuple((range(c.start, c.stop), sub) for c, sub in parts)
        for cols, sub in self.parts:
            if sub.n != len(cols) or field_e % sub.e:
                raise LengthMismatch("sub-code does not fit its column range")
        self.label = label

    def __repr__(self) -> str:
        return f"LocalCode(n={self.n}, r={self.r}, F_2^{self.e})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalCode) and self.e == other.e and self.generator == other.generator

    def __hash__(self) -> int:
        return hash((self.e, tuple(map(tuple, self.generator))))

    @property
    def field(self) -> GF2m:
        return gf(self.e)

    @property
    def r(self) -> int:
        return len(self.generator)

    @property
    def n(self) -> int:
        return len(self.generator[0])

    @functools.cached_property
    def parity_check(self) -> list[list[int]]:
        return linalg.nullspace(self.field, self.generator, self.n)

    @functools.cached_property
    def distance(self) -> int:
        """Minimum Hamming distance by enumerating messages (small codes only)."""
        from .sumrank import min_hamming_distance

        return min_hamming_distance(self.field, self.generator)

    def is_mds(self, cap: int = MINOR_CAP) -> bool:
        return is_mds(self, cap)

    def mds_or_none(self) -> bool | None:
        try:
            return self.is_mds()
        except TooLarge:
            return None

    @property
    def is_product(self) -> bool:
        """True when the generator is the block-diagonal sum of the parts."""
        if not self.parts:
            return False
        return self.generator == linalg.block_diag([_embed_sub(sub, self.e) for _, sub in self.parts])

    def embedded(self, tower: FieldTower, dst: int) -> list[list[int]]:
        return tower.embed_matrix(self.generator, self.e, dst)

    def encode(self, x: Sequence[int], F: GF2m | None = None, tower: FieldTower | None = None) -> list[int]:
        """x A, with x over F (default: the local field)."""
        if len(x) != self.r:
            raise LengthMismatch(f"expected {self.r} symbols")
        if F is None or F.degree == self.e:
            return linalg.vecmat(self.field, x, self.generator)
        return linalg.vecmat(F, x, self.embedded(tower, F.degree))


def is_mds(code: LocalCode, cap: int = MINOR_CAP) -> bool:
    """Every r-column submatrix invertible (exhaustive)."""
    r, n = code.r, code.n
    if math.comb(n, r) > cap:
        raise TooLarge(f"C({n},{r}) minors exceed the cap {cap}")
    F = code.field
    G = code.generator
    return all(linalg.rank(F, linalg.columns(G, cols)) == r for cols in itertools.combinations(range(n), r))


def cauchy_redundancy(F: GF2m, r: int, p: int) -> list[list[int]]:
    """r x p Cauchy block 1/(x_i + y_j) with disjoint point sets."""
    xs = list(range(r))
    ys = list(range(r, r + p))
    return [[F.inv(x ^ y) for y in ys] for x in xs]


def make_mds(field_e: int, r: int, delta: int) -> LocalCode:
    """Systematic (r + delta - 1, r) MDS code (I | B) over F_{2^field_e}.

    delta = 1 gives the identity, delta = 2 the single-parity code and
    r = 1 the repetition code; these exist over every field.  Otherwise B
    is a Cauchy matrix, which needs n <= 2^field_e.
    """
    if r < 1 or delta < 1:
        raise ValueError("need r >= 1 and delta >= 1")
    n = r + delta - 1
    eye = linalg.identity(r)
    if delta == 1:
        return LocalCode(field_e, eye, label="identity")
    if delta == 2:
        return LocalCode(field_e, [row + [1] for row in eye], label="single-parity")
    if r == 1:
        return LocalCode(field_e, [[1] * n], label="repetition")
    if n > (1 << field_e):
        raise FieldTooSmall(f"an ({n},{r}) MDS code needs a field of size >= {n}, got 2^{field_e}")
    B = cauchy_redundancy(gf(field_e), r, delta - 1)
    return LocalCode(field_e, [eye[i] + B[i] for i in range(r)], label="cauchy")


def make_general(field_e: int, generator: Sequence[Sequence[int]]) -> LocalCode:
    return LocalCode(field_e, generator, label="general")


def product_code(codes: Sequence[LocalCode], field_e: int | None = None) -> LocalCode:
    """Cartesian product: block-diagonal generator, sub-blocks recorded as parts.

    Sub-codes over smaller fields are embedded into ``field_e`` through the
    tower topped at ``field_e``; repair uses the same convention.
    """
    if field_e is None:
        field_e = max(c.e for c in codes)
    blocks = []
    for c in codes:
        if field_e % c.e:
            raise ValueError(f"F_2^{c.e} does not embed into F_2^{field_e}")
        blocks.append(_embed_sub(c, field_e))
    parts = []
    c0 = 0
    for c in codes:
        parts.append((range(c0, c0 + c.n), c))
        c0 += c.n
    return LocalCode(field_e, linalg.block_diag(blocks), parts=parts, label="product")


def _embed_sub(code: LocalCode, field_e: int) -> list[list[int]]:
    return _embed_sub_matrix(code.generator, code.e, field_e)


def survivor_columns(A: Sequence[Sequence[int]], F: GF2m, erased: Sequence[int]) -> list[int]:
    """First r independent surviving columns of A (left to right)."""
    gone = set(erased)
    live = [j for j in range(len(A[0])) if j not in gone]
    return linalg.independent_columns(F, A, live, limit=len(A))


def _block_plan(A: Sequence[Sequence[int]], F: GF2m, erased: set[int]) -> tuple[list[int], list[list[int]]]:
    """Survivor columns S and M with (erased entries) = (entries at S) M."""
    r = len(A)
    S = survivor_columns(A, F, sorted(erased))
    if len(S) < r:
        raise UnrepairableLocally(f"survivor rank {len(S)} < r={r}")
    E = sorted(erased)
    return S, linalg.matmul(F, linalg.inverse(F, linalg.columns(A, S)), linalg.columns(A, E))


RepairStep = tuple[list[int], list[int], list[list[int]]]


def repair_plan(code: LocalCode, erased: Sequence[int]) -> list[RepairStep]:
    """Linear repair steps (targets, sources, M) over the code's field.

    Parts are tried first, each on its own coordinates; whatever they
    cannot fix falls back to the whole group's generator, reading only
    original survivors.  Raises UnrepairableLocally when that fails too.
    """
    gone = set(erased)
    if not gone:
        return []
    if any(not 0 <= j < code.n for j in gone):
        raise LengthMismatch("erased position outside the group")
    steps: list[RepairStep] = []
    left = set(gone)
    for cols, sub in code.parts:
        loc = {j - cols.start for j in gone if j in cols}
        if not loc:
            continue
        try:
            S, M = _block_plan(sub.generator, sub.field, loc)
        except UnrepairableLocally:
            continue
        steps.append(([cols.start + j for j in sorted(loc)], [cols.start + j for j in S], _embed_sub_matrix(M, sub.e, code.e)))
        left -= {cols.start + j for j in loc}
    if left:
        S, M = _block_plan(code.generator, code.field, gone)
        E = sorted(gone)
        keep = [t for t, j in enumerate(E) if j in left]
        steps.append(([E[t] for t in keep], S, [[row[t] for t in keep] for row in M]))
    return steps


def _embed_sub_matrix(M: Sequence[Sequence[int]], src: int, dst: int) -> list[list[int]]:
    if src == dst:
        return [list(r) for r in M]
    return FieldTower(dst, [src]).embed_matrix(M, src, dst)


def is_repairable(code: LocalCode, erased: Sequence[int]) -> bool:
    try:
        repair_plan(code, erased)
    except UnrepairableLocally:
        return False
    return True


def local_repair(
    symbols: Sequence[int | None],
    code: LocalCode,
    field: GF2m | None = None,
    tower: FieldTower | None = None,
) -> list[int]:
    """Restore erased entries (None) of a group from its own survivors.

    ``field`` is the field holding the symbols; when it differs from the
    local field, matrices are embedded through ``tower``.  Never looks at
    other groups.
    """
    if len(symbols) != code.n:
        raise LengthMismatch(f"group has {code.n} positions, got {len(symbols)}")
    erased = [j for j, s in enumerate(symbols) if s is None]
    Fsym = field or code.field
    out = list(symbols)
    for targets, sources, M in repair_plan(code, erased):
        if Fsym.degree != code.e:
            tower = tower or FieldTower(Fsym.degree, [code.e])
            M = tower.embed_matrix(M, code.e, Fsym.degree)
        vals = linalg.vecmat(Fsym, [symbols[j] for j in sources], M)
        for j, v in zip(targets, vals):
            out[j] = v
    return out


def extract_outer(
    symbols: Sequence[int], code: LocalCode, field: GF2m | None = None, tower: FieldTower | None = None
) -> list[int]:
    """The r outer symbols x with x A = symbols (A has full row rank)."""
    if len(symbols) != code.n:
        raise LengthMismatch(f"group has {code.n} positions, got {len(symbols)}")
    S, Minv = extraction_matrix(code)
    Fsym = field or code.field
    if Fsym.degree != code.e:
        tower = tower or FieldTower(Fsym.degree, [code.e])
        Minv = tower.embed_matrix(Minv, code.e, Fsym.degree)
    return linalg.vecmat(Fsym, [symbols[j] for j in S], Minv)


def extraction_matrix(code: LocalCode) -> tuple[list[int], list[list[int]]]:
    """Columns S and inverse of A|_S over the local field."""
    S = survivor_columns(code.generator, code.field, [])
    return S, linalg.inverse(code.field, linalg.columns(code.generator, S))
