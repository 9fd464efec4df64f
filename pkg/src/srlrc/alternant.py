"""Subextension subcodes and sum-rank alternant codes.

With q = q0^s, the subextension subcode of C in F_{q^m}^N is C intersected
with F_{q0^m}^N.  Taking C as the dual of a linearized Reed-Solomon code of
dimension delta* - 1 gives a sum-rank alternant code: it lives over the
smaller field F_{q0^m}, has sum-rank distance (over F_q0) at least delta*
and dimension at least N - s(delta* - 1).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

from . import linalg
from .errors import NotAPowerChain
from .gf import FieldTower, GF2m, OrderedBasis, gf
from .linrs import LinRSCode
from .local import LocalCode
from .mrlrc import ErasurePattern, GlobalCode, e_max, code_locals
from .sumrank import DEFAULT_CAP, SumRankPartition, min_distance


def subextension_subcode(
    H: Sequence[Sequence[int]],
    N: int,
    tower: FieldTower,
    big_e: int,
    small_e: int,
) -> list[list[int]]:
    """Generator (rows over F_{2^small_e}) of {c in F_{2^small_e}^N : H c^T = 0}.

    H is a parity-check matrix over F_{2^big_e}.  Each parity row is
    expanded on the basis 1, a, ..., a^{s-1} of F_{2^big_e} over
    F_{2^small_e}; the subcode is the nullspace of the expanded rows.
    """
    if small_e < 1 or big_e % small_e:
        raise NotAPowerChain(f"F_2^{small_e} is not a subfield of F_2^{big_e}")
    if any(len(row) != N for row in H):
        raise ValueError("parity-check rows must have length N")
    if small_e == big_e:
        return linalg.nullspace(gf(big_e), [list(r) for r in H], N)
    basis = tower.polynomial_basis(small_e, big_e)
    s = basis.m
    expanded = []
    for row in H:
        coords = [basis.coordinates(x) for x in row]
        for t in range(s):
            expanded.append([c[t] for c in coords])
    return linalg.nullspace(gf(small_e), expanded, N)


def subcode_from_generator(G: Sequence[Sequence[int]], N: int, tower: FieldTower, big_e: int, small_e: int) -> list[list[int]]:
    H = linalg.nullspace(gf(big_e), [list(r) for r in G], N) if G else linalg.identity(N)
    return subextension_subcode(H, N, tower, big_e, small_e)


@dataclass
class AlternantCode:
    q0_e: int
    s: int
    m: int
    sizes: tuple[int, ...]
    designed: int
    parent: LinRSCode  # LinRS(designed - 1) over F_{q^m}, whose dual is restricted
    generator: list[list[int]]  # over F_{q0^m}
    tower: FieldTower

    @property
    def N(self) -> int:
        return sum(self.sizes)

    @property
    def k(self) -> int:
        return len(self.generator)

    @property
    def field(self) -> GF2m:
        return gf(self.q0_e * self.m)

    @functools.cached_property
    def basis(self) -> OrderedBasis:
        """Basis of F_{q0^m} over F_q0."""
        return self.tower.polynomial_basis(self.q0_e, self.q0_e * self.m)

    @property
    def partition(self) -> SumRankPartition:
        return SumRankPartition(self.basis, self.sizes)

    @property
    def dim_bound(self) -> int:
        return max(0, self.N - self.s * (self.designed - 1))


def alternant_code(q0_e: int, s: int, m: int, sizes: Sequence[int], designed: int, gamma: int | None = None) -> AlternantCode:
    """Subextension subcode of the dual of LinRS(designed - 1) over F_{q^m}, q = q0^s."""
    if s < 1 or q0_e < 1:
        raise NotAPowerChain("need q0 = 2^e0 with e0 >= 1 and s >= 1")
    if designed < 1:
        raise ValueError("designed distance must be at least 1")
    q_e = q0_e * s
    tower = FieldTower(q_e * m, {q0_e, q_e, q0_e * m})
    basis = tower.polynomial_basis(q_e, q_e * m)
    parent = LinRSCode(basis, sizes, designed - 1, gamma)
    N = parent.N
    H = parent.generator  # parity checks of the dual code
    G = subextension_subcode(H, N, tower, q_e * m, q0_e * m)
    return AlternantCode(q0_e, s, m, tuple(sizes), designed, parent, G, tower)


def verify_bounds(code: AlternantCode, cap: int = DEFAULT_CAP) -> dict:
    d = min_distance(code.generator, code.partition, cap) if code.k else code.N + 1
    return {
        "d_actual": d,
        "d_designed": code.designed,
        "dim_actual": code.k,
        "dim_bound": code.dim_bound,
        "ok": d >= code.designed and code.k >= code.dim_bound,
    }


def alternant_global(code: AlternantCode, local_codes: Sequence[LocalCode]) -> GlobalCode:
    """Global code with the alternant outer code; locals must live in subfields of F_q0."""
    return GlobalCode(None, code.generator, local_codes, code.basis)


def alternant_threshold(glob: GlobalCode, designed: int, pattern: ErasurePattern) -> bool:
    """Sufficient condition for decoding: sum of survivor ranks >= N - delta* + 1."""
    return sum(glob.survivor_ranks(pattern)) >= glob.N - designed + 1


def distance_bracket(glob: GlobalCode, code: AlternantCode) -> tuple[int, int]:
    """(e(A, N - delta* + 1), e(A, N - s(delta* - 1))), bracketing d_H - 1."""
    loc = code_locals(glob)
    N = glob.N
    return e_max(loc, N - code.designed + 1), e_max(loc, N - code.s * (code.designed - 1))
