"""Global MR-LRCs: an MSRD outer code composed with per-group local codes.

The global generator is G_out * diag(A_1, ..., A_g), with group i occupying
the consecutive coordinate range Gamma_i.  An erasure pattern is
correctable exactly when sum_i rank(A_i restricted to its survivors) >= k.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import (
    InsufficientRank,
    LengthMismatch,
    PreconditionNotSorted,
    ProfileInvalid,
    TooLarge,
)
from .gf import FieldTower, GF2m, OrderedBasis
from .linrs import LinRSCode, NestedFamily, default_distribution, erasure_decoder, systematic_positions
from .local import LocalCode, make_mds
from .sumrank import DEFAULT_CAP, SumRankPartition, hamming_weight, min_hamming_distance

PATTERN_CAP = 10**6


def _log2_exact(x: int, what: str) -> int:
    if x < 2 or x & (x - 1):
        raise ProfileInvalid(f"{what} must be a power of 2 (characteristic 2 only), got {x}")
    return x.bit_length() - 1


@dataclass(frozen=True)
class CodeProfile:
    """Construction parameters.  Field sizes are given as sizes (q=8, not 3)."""

    r: tuple[int, ...]
    delta: tuple[int, ...]
    q_local: tuple[int, ...]
    q: int
    m: int
    k: int
    n_explicit: tuple[int, ...] | None = None

    def __post_init__(self):
        for name in ("r", "delta", "q_local"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.n_explicit is not None:
            object.__setattr__(self, "n_explicit", tuple(self.n_explicit))
        self.validate()

    @classmethod
    def uniform(cls, g: int, r: int, delta: int, q: int, m: int, k: int, q_local: int | None = None) -> "CodeProfile":
        ql = q if q_local is None else q_local
        return cls((r,) * g, (delta,) * g, (ql,) * g, q, m, k)

    def validate(self) -> None:
        g = len(self.r)
        if g < 1:
            raise ProfileInvalid("at least one local group required")
        if len(self.delta) != g or len(self.q_local) != g:
            raise ProfileInvalid("r, delta and q_local must have one entry per group")
        if self.n_explicit is not None and len(self.n_explicit) != g:
            raise ProfileInvalid("n must have one entry per group")
        if self.q <= g:
            raise ProfileInvalid(f"q > g required (q={self.q}, g={g})")
        qe = _log2_exact(self.q, "q")
        if any(r < 1 for r in self.r):
            raise ProfileInvalid("r_i >= 1 required")
        if any(d < 1 for d in self.delta):
            raise ProfileInvalid("delta_i >= 1 required")
        if self.m < max(self.r):
            raise ProfileInvalid(f"m >= max r_i required (m={self.m}, max r_i={max(self.r)})")
        if not 1 <= self.k <= self.N:
            raise ProfileInvalid(f"1 <= k <= N required (k={self.k}, N={self.N})")
        for i, (ql, r, d) in enumerate(zip(self.q_local, self.r, self.delta)):
            e = _log2_exact(ql, f"q_local[{i}]")
            if qe % e:
                raise ProfileInvalid(f"q must be a power of q_local[{i}] (q={self.q}, q_local={ql})")
            trivial = d <= 2 or r == 1
            if self.n_explicit is None and not trivial and ql < r + d - 1:
                raise ProfileInvalid(f"q_local[{i}] >= r_i + delta_i - 1 required ({ql} < {r + d - 1})")

    @property
    def g(self) -> int:
        return len(self.r)

    @property
    def q_e(self) -> int:
        return self.q.bit_length() - 1

    @property
    def local_e(self) -> tuple[int, ...]:
        return tuple(x.bit_length() - 1 for x in self.q_local)

    @property
    def field_e(self) -> int:
        return self.q_e * self.m

    @property
    def N(self) -> int:
        return sum(self.r)

    @property
    def h(self) -> int:
        return self.N - self.k

    @property
    def n_i(self) -> tuple[int, ...]:
        if self.n_explicit is not None:
            return self.n_explicit
        return tuple(r + d - 1 for r, d in zip(self.r, self.delta))

    @property
    def n(self) -> int:
        return sum(self.n_i)

    @property
    def groups(self) -> list[range]:
        out = []
        off = 0
        for ni in self.n_i:
            out.append(range(off, off + ni))
            off += ni
        return out

    def with_k(self, k: int) -> "CodeProfile":
        return CodeProfile(self.r, self.delta, self.q_local, self.q, self.m, k, self.n_explicit)

    def to_dict(self) -> dict:
        d = {"r": list(self.r), "delta": list(self.delta), "q_local": list(self.q_local), "q": self.q, "m": self.m, "k": self.k}
        if self.n_explicit is not None:
            d["n"] = list(self.n_explicit)
        return d


@dataclass(frozen=True)
class ErasurePattern:
    """Erased local positions per group (0-based inside each group)."""

    erased: tuple[frozenset, ...]

    @classmethod
    def empty(cls, g: int) -> "ErasurePattern":
        return cls(tuple(frozenset() for _ in range(g)))

    @classmethod
    def from_global(cls, indices: Iterable[int], group_sizes: Sequence[int]) -> "ErasurePattern":
        sets: list[set[int]] = [set() for _ in group_sizes]
        starts = list(itertools.accumulate(group_sizes, initial=0))
        n = starts[-1]
        for j in indices:
            if not 0 <= j < n:
                raise LengthMismatch(f"position {j} outside [0, {n})")
            i = next(t for t in range(len(group_sizes)) if starts[t] <= j < starts[t + 1])
            sets[i].add(j - starts[i])
        return cls(tuple(frozenset(s) for s in sets))

    def to_global(self, group_sizes: Sequence[int]) -> list[int]:
        starts = list(itertools.accumulate(group_sizes, initial=0))
        return sorted(starts[i] + j for i, s in enumerate(self.erased) for j in s)

    def survivors(self, group_sizes: Sequence[int]) -> list[list[int]]:
        return [[j for j in range(ni) if j not in s] for ni, s in zip(group_sizes, self.erased)]

    def size(self) -> int:
        return sum(len(s) for s in self.erased)


class GlobalCode:
    """Outer code (k x N over F_{q^m}) composed with local codes."""

    def __init__(
        self,
        profile: CodeProfile | None,
        outer_generator: Sequence[Sequence[int]],
        local_codes: Sequence[LocalCode],
        basis: OrderedBasis,
        outer: LinRSCode | None = None,
    ):
        self.profile = profile
        self.basis = basis
        self.tower = basis.tower
        self.outer_generator = [list(r) for r in outer_generator]
        self.local_codes = list(local_codes)
        self.outer = outer
        if profile is not None:
            if len(self.local_codes) != profile.g or tuple(c.r for c in self.local_codes) != profile.r:
                raise ProfileInvalid(f"local code dimensions must equal r={profile.r}")
            if len(self.outer_generator) != profile.k:
                raise LengthMismatch("outer generator must have k rows")
        for i, c in enumerate(self.local_codes):
            if self.q_e % c.e:
                raise ProfileInvalid(f"local field F_2^{c.e} of group {i} does not embed into F_q")
        if any(len(row) != self.N for row in self.outer_generator):
            raise LengthMismatch("outer generator must have N = sum r_i columns")

    def __repr__(self) -> str:
        return f"GlobalCode(n={self.n}, k={self.k}, g={self.g}, F_2^{self.field.degree})"

    # -- shape ------------------------------------------------------------

    @property
    def field(self) -> GF2m:
        return self.basis.field

    @property
    def q_e(self) -> int:
        return self.basis.sub

    @property
    def k(self) -> int:
        return len(self.outer_generator)

    @property
    def g(self) -> int:
        return len(self.local_codes)

    @property
    def r(self) -> tuple[int, ...]:
        return tuple(c.r for c in self.local_codes)

    @property
    def n_i(self) -> tuple[int, ...]:
        return tuple(c.n for c in self.local_codes)

    @property
    def n(self) -> int:
        return sum(self.n_i)

    @property
    def N(self) -> int:
        return sum(self.r)

    @property
    def groups(self) -> list[range]:
        starts = list(itertools.accumulate(self.n_i, initial=0))
        return [range(a, b) for a, b in zip(starts, starts[1:])]

    @property
    def outer_offsets(self) -> list[int]:
        return list(itertools.accumulate(self.r, initial=0))

    @property
    def partition(self) -> SumRankPartition:
        return SumRankPartition(self.basis, self.r)

    def local_over_q(self, i: int) -> list[list[int]]:
        """A_i with entries embedded in F_q."""
        c = self.local_codes[i]
        return self.tower.embed_matrix(c.generator, c.e, self.q_e)

    @functools.cached_property
    def _embedded_locals(self) -> list[list[list[int]]]:
        return [c.embedded(self.tower, self.field.degree) for c in self.local_codes]

    @functools.cached_property
    def A(self) -> list[list[int]]:
        """N x n block-diagonal local matrix over F_{q^m}."""
        return linalg.block_diag(self._embedded_locals)

    @functools.cached_property
    def generator(self) -> list[list[int]]:
        return self.apply_locals(self.outer_generator)

    def apply_locals(self, M: Sequence[Sequence[int]]) -> list[list[int]]:
        """M diag(A_1, ..., A_g) computed group by group."""
        F = self.field
        off = self.outer_offsets
        out = [[] for _ in M]
        for i, Ai in enumerate(self._embedded_locals):
            block = [row[off[i] : off[i + 1]] for row in M]
            prod = linalg.matmul(F, block, Ai)
            for row, p in zip(out, prod):
                row.extend(p)
        return out

    def systematic_generator(self, distribution: Sequence[int] | None = None) -> list[list[int]]:
        """Global generator whose outer part is systematic on the given distribution."""
        dist = default_distribution(self.r, self.k) if distribution is None else list(distribution)
        cols = systematic_positions(self.r, self.k, dist)
        F = self.field
        T = linalg.inverse(F, linalg.columns(self.outer_generator, cols))
        return self.apply_locals(linalg.matmul(F, T, self.outer_generator))

    # -- encoding ---------------------------------------------------------

    def encode(self, message: Sequence[int], systematic: Sequence[int] | None = None) -> list[int]:
        if len(message) != self.k:
            raise LengthMismatch(f"message of length {len(message)} for k={self.k}")
        G = self.generator if systematic is None else self.systematic_generator(systematic)
        return linalg.vecmat(self.field, message, G)

    def encode_outer(self, outer_word: Sequence[int]) -> list[int]:
        """Apply the local codes to an outer codeword."""
        return self.apply_locals([list(outer_word)])[0]

    # -- erasures ---------------------------------------------------------

    def pattern(self, erased_global: Iterable[int]) -> ErasurePattern:
        return ErasurePattern.from_global(erased_global, self.n_i)

    def survivor_ranks(self, pattern: ErasurePattern) -> list[int]:
        out = []
        for c, R in zip(self.local_codes, pattern.survivors(self.n_i)):
            out.append(linalg.rank(c.field, linalg.columns(c.generator, R)) if R else 0)
        return out

    def correctable(self, pattern: ErasurePattern) -> bool:
        return sum(self.survivor_ranks(pattern)) >= self.k

    def folded_blocks(self, pattern: ErasurePattern) -> list[list[list[int]]]:
        """A_i restricted to survivors, over F_q."""
        out = []
        for i, R in enumerate(pattern.survivors(self.n_i)):
            Aq = self.local_over_q(i)
            out.append(linalg.columns(Aq, R) if R else [[] for _ in range(self.r[i])])
        return out

    def decoder_matrix(self, pattern: ErasurePattern, G: Sequence[Sequence[int]] | None = None) -> tuple[list[int], list[list[int]]]:
        """Global positions P and a k x k matrix M with message = c[P] M.

        ``G`` selects the outer generator the message refers to (default:
        the plain one).
        """
        if not self.correctable(pattern):
            raise InsufficientRank("erasure pattern is not correctable: sum of survivor ranks < k")
        folded = self.folded_blocks(pattern)
        G = self.outer_generator if G is None else G
        coords, M = erasure_decoder(self.field, G, self.r, folded, self.basis)
        surv = pattern.survivors(self.n_i)
        starts = [g.start for g in self.groups]
        return [starts[i] + surv[i][j] for i, j in coords], M

    def decode(self, received: Sequence[int | None], pattern: ErasurePattern | None = None, systematic: Sequence[int] | None = None) -> list[int]:
        """Message from a codeword whose erased entries are None (or listed in pattern)."""
        if len(received) != self.n:
            raise LengthMismatch(f"received word of length {len(received)} for n={self.n}")
        if pattern is None:
            pattern = self.pattern(j for j, x in enumerate(received) if x is None)
        G = None
        if systematic is not None:
            cols = systematic_positions(self.r, self.k, systematic)
            T = linalg.inverse(self.field, linalg.columns(self.outer_generator, cols))
            G = linalg.matmul(self.field, T, self.outer_generator)
        pos, M = self.decoder_matrix(pattern, G)
        if not pos:
            return []
        return linalg.vecmat(self.field, [received[j] for j in pos], M)

    def decode_blocks(self, symbols: np.ndarray, pattern: ErasurePattern, G: Sequence[Sequence[int]] | None = None) -> np.ndarray:
        """Vectorised decode: ``symbols`` has shape (n, B); returns (k, B)."""
        pos, M = self.decoder_matrix(pattern, G)
        return self.field.vecmat(symbols[pos], M)

    def encode_blocks(self, messages: np.ndarray, G: Sequence[Sequence[int]] | None = None) -> np.ndarray:
        """Vectorised encode: ``messages`` has shape (k, B); returns (n, B)."""
        return self.field.vecmat(messages, self.generator if G is None else G)

    def repair_group(self, i: int, symbols: Sequence[int | None]) -> list[int]:
        from .local import local_repair

        return local_repair(symbols, self.local_codes[i], self.field, self.tower)


# ---------------------------------------------------------------------------
# construction


def construct(
    profile: CodeProfile,
    local_codes: Sequence[LocalCode] | None = None,
    outer_generator: Sequence[Sequence[int]] | None = None,
    tower: FieldTower | None = None,
) -> GlobalCode:
    """Linearized Reed-Solomon outer code with MDS (or given) local codes."""
    tower = tower or FieldTower(profile.field_e, set(profile.local_e) | {profile.q_e})
    basis = tower.polynomial_basis(profile.q_e, profile.field_e)
    if local_codes is None:
        local_codes = [make_mds(e, r, d) for e, r, d in zip(profile.local_e, profile.r, profile.delta)]
    outer = None
    if outer_generator is None:
        outer = LinRSCode(basis, profile.r, profile.k)
        outer_generator = outer.generator
    return GlobalCode(profile, outer_generator, local_codes, basis, outer)


def construct_from_family(family: NestedFamily, profile: CodeProfile, local_codes: Sequence[LocalCode]) -> GlobalCode:
    return GlobalCode(profile, family.generator(profile.k, profile.r), local_codes, family.basis)


def random_outer(code: GlobalCode, rng) -> list[list[int]]:
    """Random full-rank k x N generator, for sabotage checks."""
    F = code.field
    while True:
        G = [[F.random_element(rng) for _ in range(code.N)] for _ in range(code.k)]
        if linalg.rank(F, G) == code.k:
            return G


# ---------------------------------------------------------------------------
# maximal recoverability


def _local_distance(c: LocalCode) -> int:
    return c.n - c.r + 1 if c.mds_or_none() else c.distance


def _flat_groups(code: GlobalCode) -> list[tuple[range, int]]:
    """(coordinate range, local distance) per group; Cartesian products split into their parts."""
    out = []
    for c, grp in zip(code.local_codes, code.groups):
        if c.is_product:
            for cols, sub in c.parts:
                out.append((range(grp.start + cols.start, grp.start + cols.stop), _local_distance(sub)))
        else:
            out.append((grp, _local_distance(c)))
    return out


def mr_patterns(code: GlobalCode) -> Iterable[list[int]]:
    """Every Delta: delta_i - 1 positions removed from each (sub)group."""
    groups = _flat_groups(code)
    choices = [itertools.combinations(list(rg), d - 1) for rg, d in groups]
    for pick in itertools.product(*choices):
        gone = set(itertools.chain.from_iterable(pick))
        yield [j for j in range(code.n) if j not in gone]


def mr_pattern_count(code: GlobalCode) -> int:
    return math.prod(math.comb(len(rg), d - 1) for rg, d in _flat_groups(code))


def is_mds_matrix(F: GF2m, M: Sequence[Sequence[int]], cap: int = PATTERN_CAP) -> bool:
    k = len(M)
    n = len(M[0]) if k else 0
    if k == 0:
        return True
    if k > n:
        return False
    if math.comb(n, k) > cap:
        raise TooLarge(f"C({n},{k}) subsets exceed the cap")
    return all(linalg.rank(F, linalg.columns(M, S)) == k for S in itertools.combinations(range(n), k))


def mr_check(code: GlobalCode, cap: int = PATTERN_CAP) -> tuple[bool, int, list[int] | None]:
    """(is MR, number of Delta patterns checked, first failing Delta)."""
    total = mr_pattern_count(code)
    n_delta = code.n - sum(d - 1 for _, d in _flat_groups(code))
    if total * math.comb(max(n_delta, 0), min(code.k, max(n_delta, 0))) > cap * 10:
        raise TooLarge(f"{total} patterns x C({n_delta},{code.k}) subsets exceed the cap")
    F = code.field
    G = code.generator
    checked = 0
    for delta in mr_patterns(code):
        checked += 1
        if not is_mds_matrix(F, linalg.columns(G, delta), cap):
            return False, checked, delta
    return True, checked, None


def verify_mr_exhaustive(code: GlobalCode, cap: int = PATTERN_CAP) -> bool:
    return mr_check(code, cap)[0]


# ---------------------------------------------------------------------------
# global distance and the erasure threshold e(A, k)


def _group_min_ranks(F: GF2m, Ai: Sequence[Sequence[int]]) -> list[int]:
    """min rank of A_i after erasing exactly t columns, for t = 0..n_i."""
    n = len(Ai[0])
    out = []
    for t in range(n + 1):
        best = len(Ai)
        for gone in itertools.combinations(range(n), t):
            R = [j for j in range(n) if j not in gone]
            rk = linalg.rank(F, linalg.columns(Ai, R)) if R else 0
            best = min(best, rk)
            if best == 0:
                break
        out.append(best)
    return out


def min_rank_after_erasures(local: Sequence[tuple[GF2m, Sequence[Sequence[int]]]], e: int) -> int:
    """min over |E| = e of sum_i rank(A_i|R_i), by a knapsack over groups."""
    tables = [_group_min_ranks(F, Ai) for F, Ai in local]
    INF = 10**9
    best = [0] + [INF] * e
    for tab in tables:
        new = [INF] * (e + 1)
        for used in range(e + 1):
            if best[used] == INF:
                continue
            for t in range(min(len(tab) - 1, e - used) + 1):
                v = best[used] + tab[t]
                if v < new[used + t]:
                    new[used + t] = v
        best = new
    return best[e]


def e_max(local: Sequence[tuple[GF2m, Sequence[Sequence[int]]]], k: int) -> int:
    """Largest e in [n] such that every e erasures leave rank >= k (0 if none)."""
    n = sum(len(Ai[0]) for _, Ai in local)
    best = 0
    for e in range(1, n + 1):
        if min_rank_after_erasures(local, e) >= k:
            best = e
        else:
            break  # the minimum rank is non-increasing in e
    return best


def e_max_bruteforce(local: Sequence[tuple[GF2m, Sequence[Sequence[int]]]], k: int, cap: int = PATTERN_CAP) -> int:
    """Same quantity by enumerating every survivor set of the block-diagonal matrix."""
    sizes = [len(Ai[0]) for _, Ai in local]
    n = sum(sizes)
    starts = list(itertools.accumulate(sizes, initial=0))
    if 2**n > cap:
        raise TooLarge(f"2^{n} survivor sets exceed the cap")
    best = 0
    for e in range(1, n + 1):
        worst = None
        for R in itertools.combinations(range(n), n - e):
            rk = 0
            for i, (F, Ai) in enumerate(local):
                cols = [j - starts[i] for j in R if starts[i] <= j < starts[i + 1]]
                rk += linalg.rank(F, linalg.columns(Ai, cols)) if cols else 0
            worst = rk if worst is None else min(worst, rk)
        if worst >= k:
            best = e
    return best


def code_locals(code: GlobalCode) -> list[tuple[GF2m, list[list[int]]]]:
    return [(c.field, c.generator) for c in code.local_codes]


def closed_form_e(r: Sequence[int], delta: Sequence[int], k: int) -> int:
    """n - k - sum_{i <= l} (delta_i - 1) for MDS locals, r ascending, delta descending."""
    r, delta = list(r), list(delta)
    if any(a > b for a, b in zip(r, r[1:])) or any(a < b for a, b in zip(delta, delta[1:])):
        raise PreconditionNotSorted("need r ascending and delta descending")
    N = sum(r)
    if not 1 <= k <= N:
        raise ValueError(f"k must lie in [1, {N}]")
    n = sum(a + d - 1 for a, d in zip(r, delta))
    ell = 0
    acc = 0
    while acc + r[ell] < k:
        acc += r[ell]
        ell += 1
    return n - k - sum(d - 1 for d in delta[:ell])


def global_distance(code: GlobalCode) -> int:
    """e(A, k) + 1, exact when the outer code is MSRD."""
    return e_max(code_locals(code), code.k) + 1


def global_distance_bruteforce(code: GlobalCode, cap: int = DEFAULT_CAP) -> int:
    return min_hamming_distance(code.field, code.generator, cap)


# ---------------------------------------------------------------------------
# field-size planner


@dataclass(frozen=True)
class PlanRow:
    x: int
    base: int
    exponent: int

    @property
    def value(self) -> int:
        return self.base**self.exponent

    @property
    def log2(self) -> float:
        return self.exponent * math.log2(self.base)

    def pretty(self) -> str:
        b = self.base
        if b & (b - 1) == 0:
            return f"2^{self.exponent * (b.bit_length() - 1)}"
        return f"{b}^{self.exponent}"


def plan_field_size(g: int, r: int, delta: int) -> tuple[list[PlanRow], int]:
    """F(x) = max{x+1, r+delta-1}^ceil(g r / x) for x = 1..g, and its argmin.

    Ties go to the largest x.
    """
    if min(g, r, delta) < 1:
        raise ValueError("g, r and delta must be positive")
    rows = [PlanRow(x, max(x + 1, r + delta - 1), -(-g * r // x)) for x in range(1, g + 1)]
    best = rows[0]
    for row in rows[1:]:
        if row.value <= best.value:
            best = row
    return rows, best.x


def hamming_weights(code: GlobalCode) -> Iterable[int]:
    from .sumrank import codewords

    for c in codewords(code.field, code.generator, projective=True):
        yield hamming_weight(c)
