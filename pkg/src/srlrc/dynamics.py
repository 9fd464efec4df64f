"""Reconfiguration of a stored MR-LRC without global re-encoding.

A DynamicState keeps every group's stored symbols as a numpy array of
shape (n_i, B): one column per independent stripe.  The outer code is the
k-row nested linearized Reed-Solomon generator restricted to the first
r_i columns of block i, so the stored data is determined by the message
f (k x B) and the local codes.  Local recodings only touch one group;
changes of r_i, k or g use the nested family and never re-encode the
other groups.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import (
    BadPartitionSum,
    DimensionMismatch,
    GroupCountOutOfRange,
    KOutOfRange,
    LocalityOutOfRange,
    UnrepairableLocally,
    WouldViolateKBound,
)
from .gf import FieldTower, GF2m
from .linrs import LinRSCode, NestedFamily
from .local import LocalCode, extraction_matrix, make_mds, product_code
from .mrlrc import ErasurePattern, GlobalCode


@dataclass(frozen=True)
class RecodingMatrix:
    group: int
    T: list[list[int]]  # n_i x n_i' over F_{2^e}
    e: int


def recoding_matrix(A: LocalCode, B: LocalCode, group: int = 0) -> RecodingMatrix:
    """T with A T = B, built as C^T B where A C^T = I.

    C^T is the inverse of A on its first r independent columns, padded
    with zero rows.  T lives over the smaller field containing both local
    fields.
    """
    if A.r != B.r:
        raise DimensionMismatch(f"local dimensions differ: {A.r} vs {B.r}")
    e = A.e * B.e // _gcd(A.e, B.e)
    tower = FieldTower(e, [A.e, B.e])
    F = tower.field(e)
    S, inv = extraction_matrix(A)
    inv = tower.embed_matrix(inv, A.e, e)
    Ct = [[0] * A.r for _ in range(A.n)]
    for row, j in zip(inv, S):
        Ct[j] = row
    T = linalg.matmul(F, Ct, tower.embed_matrix(B.generator, B.e, e))
    return RecodingMatrix(group, T, e)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


class DynamicState:
    """Stored stripes of a global code, with the reconfiguration operations."""

    def __init__(self, family: NestedFamily, k: int, local_codes: Sequence[LocalCode], symbols: Sequence[np.ndarray]):
        self.family = family
        self.k = k
        self.local_codes = list(local_codes)
        self.symbols = [np.asarray(s, dtype=np.int64) for s in symbols]
        self._check()

    @classmethod
    def encode(cls, family: NestedFamily, local_codes: Sequence[LocalCode], f: np.ndarray) -> "DynamicState":
        """Store the message ``f`` (k x B, plain nested-generator coordinates)."""
        f = np.atleast_2d(np.asarray(f, dtype=np.int64))
        state = cls(family, f.shape[0], local_codes, [np.zeros((c.n, f.shape[1]), dtype=np.int64) for c in local_codes])
        state.symbols = state._encode_groups(f, range(len(local_codes)), [c.r for c in local_codes])
        return state

    def _check(self) -> None:
        fam = self.family
        if not 1 <= self.g <= fam.blocks:
            raise GroupCountOutOfRange(f"1 <= g <= q-1 = {fam.blocks} required")
        if any(not 1 <= r <= fam.m for r in self.r):
            raise LocalityOutOfRange(f"every r_i must lie in [1, m={fam.m}]")
        if not 1 <= self.k <= self.N:
            raise WouldViolateKBound(f"k={self.k} must satisfy 1 <= k <= sum r_i = {self.N}")
        if len(self.symbols) != self.g or any(s.shape[0] != c.n for s, c in zip(self.symbols, self.local_codes)):
            raise DimensionMismatch("symbol arrays do not match the local codes")

    def copy(self) -> "DynamicState":
        return DynamicState(self.family, self.k, self.local_codes, [s.copy() for s in self.symbols])

    # -- views ------------------------------------------------------------

    @property
    def field(self) -> GF2m:
        return self.family.field

    @property
    def tower(self) -> FieldTower:
        return self.family.basis.tower

    @property
    def g(self) -> int:
        return len(self.local_codes)

    @property
    def r(self) -> list[int]:
        return [c.r for c in self.local_codes]

    @property
    def N(self) -> int:
        return sum(self.r)

    @property
    def blocks(self) -> int:
        return self.symbols[0].shape[1] if self.symbols else 0

    @property
    def code(self) -> GlobalCode:
        return GlobalCode(None, self.family.generator(self.k, self.r), self.local_codes, self.family.basis)

    def stacked(self) -> np.ndarray:
        return np.concatenate(self.symbols, axis=0)

    def _embed(self, M: Sequence[Sequence[int]], e: int) -> list[list[int]]:
        return self.tower.embed_matrix(M, e, self.field.degree)

    def outer_symbols(self, i: int) -> np.ndarray:
        """Outer components of group i, (r_i, B), decoded from the group alone."""
        c = self.local_codes[i]
        S, inv = extraction_matrix(c)
        return self.field.vecmat(self.symbols[i][S], self._embed(inv, c.e))

    def decode(self, pattern: ErasurePattern | None = None) -> np.ndarray:
        """The message f (k x B); ``pattern`` lists symbols to ignore."""
        code = self.code
        pattern = pattern or ErasurePattern.empty(self.g)
        return code.decode_blocks(self.stacked(), pattern)

    def _encode_groups(self, f: np.ndarray, groups: Sequence[int], widths: Sequence[int]) -> list[np.ndarray]:
        """f G_{k,i}[:, :r] A_i for each requested family block i."""
        out = []
        for i, r in zip(groups, widths):
            outer = self.field.vecmat(f, self.family.block(f.shape[0], i, range(r)))
            c = self.local_codes[i]
            out.append(self.field.vecmat(outer, self._embed(c.generator, c.e)))
        return out

    # -- local recodings ----------------------------------------------------

    def recode_group(self, i: int, target: LocalCode) -> RecodingMatrix:
        """Replace group i's local code by ``target`` (same dimension)."""
        self._group(i)
        Tm = recoding_matrix(self.local_codes[i], target, i)
        if self.field.degree % Tm.e or self.family.basis.sub % target.e:
            raise DimensionMismatch("target local field does not embed into the base field")
        self.symbols[i] = self.field.vecmat(self.symbols[i], self._embed(Tm.T, Tm.e))
        self.local_codes[i] = target
        return Tm

    def partition_group(self, i: int, parts: Sequence[int], sub_codes: Sequence[LocalCode] | None = None) -> RecodingMatrix:
        """Recode group i into a Cartesian product of codes of dimensions ``parts``."""
        self._group(i)
        if sum(parts) != self.r[i] or any(p < 1 for p in parts):
            raise BadPartitionSum(f"parts {list(parts)} must be positive and sum to r_i={self.r[i]}")
        cur = self.local_codes[i]
        if sub_codes is None:
            d = _delta(cur)
            sub_codes = [make_mds(cur.e, p, d) for p in parts]
        if len(sub_codes) != len(parts) or any(c.r != p for c, p in zip(sub_codes, parts)):
            raise BadPartitionSum("sub-code dimensions must equal the parts")
        e = max(c.e for c in sub_codes)
        for c in sub_codes:
            if e % c.e:
                raise DimensionMismatch("sub-code fields must form a chain")
        return self.recode_group(i, product_code(sub_codes, e))

    # -- nested updates -------------------------------------------------------

    def change_locality(self, i: int, r_new: int, local: LocalCode | None = None) -> None:
        """Shrink or grow r_i, re-encoding group i with ``local`` (default: MDS, same delta)."""
        self._group(i)
        r_old = self.r[i]
        if not 1 <= r_new <= self.family.m:
            raise LocalityOutOfRange(f"r_i' must lie in [1, m={self.family.m}]")
        if r_new == r_old and local is None:
            return
        if self.N - r_old + r_new < self.k:
            raise WouldViolateKBound(f"k={self.k} > sum r_i after the change")
        cur = self.local_codes[i]
        if local is None:
            local = make_mds(cur.e, r_new, _delta(cur))
        if local.r != r_new:
            raise DimensionMismatch(f"new local code has dimension {local.r}, expected {r_new}")
        outer = self.outer_symbols(i)
        if r_new < r_old:
            outer = outer[:r_new]
        elif r_new > r_old:
            f = self.decode()
            D = self.family.block(self.k, i, range(r_old, r_new))
            outer = np.concatenate([outer, self.field.vecmat(f, D)], axis=0)
        self.local_codes[i] = local
        self.symbols[i] = self.field.vecmat(outer, self._embed(local.generator, local.e))

    def change_file_size(self, k_new: int, data: np.ndarray | None = None) -> np.ndarray | None:
        """Append rows ``data`` to the message (k_new > k) or drop the last rows.

        Dropping returns the removed rows.  The update is c + d E A with E
        the last |k_new - k| rows of the larger nested generator.
        """
        if not 1 <= k_new <= self.N:
            raise KOutOfRange(f"k' must lie in [1, sum r_i = {self.N}]")
        if k_new == self.k:
            return None
        lo, hi = sorted((self.k, k_new))
        removed = None
        if k_new > self.k:
            d = np.atleast_2d(np.asarray(data, dtype=np.int64))
            if d.shape != (hi - lo, self.blocks):
                raise DimensionMismatch(f"new data must have shape {(hi - lo, self.blocks)}")
        else:
            d = self.decode()[lo:]
            removed = d
        for i, c in enumerate(self.local_codes):
            E = [row for row in self.family.block(hi, i, range(c.r))[lo:]]
            delta = self.field.vecmat(self.field.vecmat(d, E), self._embed(c.generator, c.e))
            self.symbols[i] = self.symbols[i] ^ delta
        self.k = k_new
        return removed

    def change_group_count(self, g_new: int, local_codes: Sequence[LocalCode] = ()) -> list[np.ndarray]:
        """Add groups (with the given local codes) or delete trailing groups.

        Deleting returns the removed groups' symbol arrays.
        """
        if not 1 <= g_new <= self.family.blocks:
            raise GroupCountOutOfRange(f"g' must lie in [1, q-1 = {self.family.blocks}]")
        if g_new == self.g:
            return []
        if g_new < self.g:
            if sum(self.r[:g_new]) < self.k:
                raise WouldViolateKBound(f"removing groups leaves sum r_i < k={self.k}")
            removed = self.symbols[g_new:]
            self.symbols = self.symbols[:g_new]
            self.local_codes = self.local_codes[:g_new]
            return removed
        new = list(local_codes)
        if len(new) != g_new - self.g:
            raise DimensionMismatch(f"{g_new - self.g} new local codes required")
        for c in new:
            if not 1 <= c.r <= self.family.m:
                raise LocalityOutOfRange(f"new r_i must lie in [1, m={self.family.m}]")
            if self.family.basis.sub % c.e:
                raise DimensionMismatch("new local field does not embed into the base field")
        f = self.decode()
        idx = list(range(self.g, g_new))
        self.local_codes.extend(new)
        self.symbols.extend(self._encode_groups(f, idx, [c.r for c in new]))
        return []

    def _group(self, i: int) -> None:
        if not 0 <= i < self.g:
            raise GroupCountOutOfRange(f"group index {i} outside [0, {self.g})")

    def require_locally_decodable(self, i: int, erased: Sequence[int]) -> None:
        from .local import is_repairable

        if erased and not is_repairable(self.local_codes[i], erased):
            raise UnrepairableLocally(f"group {i} cannot be decoded locally")


def _delta(c: LocalCode) -> int:
    if c.mds_or_none():
        return c.n - c.r + 1
    return c.distance


def make_multilayer(outer: LinRSCode, inner: Sequence[GlobalCode], k: int | None = None) -> GlobalCode:
    """Global code whose i-th local code is the i-th inner global code.

    Each inner generator (r_i x n_i over F_{Q_i}) is used as A_i; its own
    local codes become parts, so repairs inside an inner group never reach
    the upper layer.
    """
    base_e = outer.basis.sub
    locals_ = []
    for i, (code, r) in enumerate(zip(inner, outer.sizes)):
        if code.k != r:
            raise DimensionMismatch(f"inner code {i} has dimension {code.k}, expected r_i={r}")
        e = code.field.degree
        if base_e % e:
            raise DimensionMismatch(f"inner field F_2^{e} does not embed into F_q = F_2^{base_e}")
        parts = [(grp, c) for grp, c in zip(code.groups, code.local_codes)]
        locals_.append(LocalCode(e, code.generator, parts=parts, label="layer"))
    if len(inner) != len(outer.sizes):
        raise DimensionMismatch("one inner code per outer block required")
    return GlobalCode(None, outer.generator, locals_, outer.basis, outer)
