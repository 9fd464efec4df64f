"""Binary finite fields F_{2^e}, field towers and subfield bases.

Elements are plain ints holding the bit-packed residue of a polynomial over
F_2 modulo the field's defining polynomial.  A ``GF2m`` object carries the
arithmetic; a ``FieldTower`` fixes compatible embeddings between all the
subfields of one top field.
"""

from __future__ import annotations

import functools
from typing import Iterable, Sequence

import numpy as np

from .errors import NoIrreducibleFound, NonDividingChain, NotInSubfield

# log/antilog tables are built up to this degree; larger fields multiply bitwise
TABLE_LIMIT = 20


# ---------------------------------------------------------------------------
# polynomials over F_2 packed in ints


def _pmod(a: int, p: int) -> int:
    dp = p.bit_length()
    while a.bit_length() >= dp:
        a ^= p << (a.bit_length() - dp)
    return a


def _pmulmod(a: int, b: int, p: int) -> int:
    dp = p.bit_length() - 1
    top = 1 << dp
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= p
    return r


def _pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, _pmod(a, b)
    return a


def is_irreducible(p: int) -> bool:
    """Ben-Or test for a polynomial over F_2 given as a bit mask."""
    d = p.bit_length() - 1
    if d < 1:
        return False
    if d == 1:
        return True
    if not p & 1:
        return False
    x = 0b10
    h = x
    for _ in range(d // 2):
        h = _pmulmod(h, h, p)
        if _pgcd(p, h ^ x) != 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def irreducible_poly(degree: int) -> int:
    """Lowest irreducible polynomial of the given degree (x+1 for degree 1)."""
    if degree < 1:
        raise ValueError("degree must be positive")
    if degree == 1:
        return 0b11
    for p in range((1 << degree) | 1, 1 << (degree + 1), 2):
        if is_irreducible(p):
            return p
    raise NoIrreducibleFound(f"no irreducible polynomial of degree {degree}")


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# a single field


class GF2m:
    """The field F_{2^degree}."""

    def __init__(self, degree: int):
        if degree < 1:
            raise ValueError("degree must be positive")
        self.degree = degree
        self.order = 1 << degree
        self.poly = irreducible_poly(degree)
        self._mask = self.order - 1
        self._factors = _prime_factors(self.order - 1)
        self.generator = self._find_primitive()
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        self._np_exp: np.ndarray | None = None
        self._np_log: np.ndarray | None = None
        if degree <= TABLE_LIMIT:
            self._build_tables()

    def __repr__(self) -> str:
        return f"GF(2^{self.degree})"

    def __reduce__(self):
        return (gf, (self.degree,))

    # -- construction helpers -------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        return _pmulmod(a, b, self.poly)

    def _slow_pow(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            n >>= 1
        return r

    def _find_primitive(self) -> int:
        n = self.order - 1
        if n == 1:
            return 1
        for c in range(2, self.order):
            if all(self._slow_pow(c, n // p) != 1 for p in self._factors):
                return c
        raise RuntimeError("field has no primitive element")  # unreachable

    def _mul_array_bitwise(self, arr: np.ndarray, s: int) -> np.ndarray:
        a = arr.astype(np.int64, copy=True)
        res = np.zeros_like(a)
        top = self.order
        while s:
            if s & 1:
                res ^= a
            s >>= 1
            a <<= 1
            a ^= np.where(a & top, self.poly, 0)
        return res

    def _build_tables(self) -> None:
        n = self.order - 1
        chunk = 1024
        exp = np.zeros(n, dtype=np.int64)
        first = [1]
        for _ in range(min(chunk, n) - 1):
            first.append(self._slow_mul(first[-1], self.generator))
        exp[: len(first)] = first
        step = self._slow_pow(self.generator, chunk)
        filled = len(first)
        while filled < n:
            take = min(chunk, n - filled)
            exp[filled : filled + take] = self._mul_array_bitwise(
                exp[filled - chunk : filled - chunk + take], step
            )
            filled += take
        log = np.zeros(self.order, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        self._np_exp = np.concatenate([exp, exp])
        self._np_log = log
        self._exp = self._np_exp.tolist()
        self._log = log.tolist()

    # -- scalar arithmetic ----------------------------------------------

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        if self._log is not None:
            lg = self._log
            return self._exp[lg[a] + lg[b]]
        return self._slow_mul(a, b)

    def inv(self, a: int) -> int:
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if self._log is not None:
            return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]
        return self._slow_pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if not a:
            return 0
        if n < 0:
            a, n = self.inv(a), -n
        if self._log is not None:
            return self._exp[(self._log[a] * n) % (self.order - 1)]
        return self._slow_pow(a, n % (self.order - 1) or (self.order - 1))

    def log(self, a: int) -> int:
        if not a:
            raise ValueError("log of zero")
        if self._log is not None:
            return self._log[a]
        g, x, i = self.generator, 1, 0
        while x != a:
            x, i = self._slow_mul(x, g), i + 1
        return i

    def exp(self, i: int) -> int:
        return self.pow(self.generator, i)

    def scale(self, s: int, row: Sequence[int]) -> list[int]:
        """s * row, entrywise."""
        if not s:
            return [0] * len(row)
        if s == 1:
            return list(row)
        if self._log is not None:
            ls, lg, ex = self._log[s], self._log, self._exp
            return [ex[ls + lg[x]] if x else 0 for x in row]
        return [self._slow_mul(s, x) for x in row]

    def axpy(self, s: int, x: Sequence[int], y: Sequence[int]) -> list[int]:
        """y + s*x."""
        if not s:
            return list(y)
        if self._log is not None:
            ls, lg, ex = self._log[s], self._log, self._exp
            return [b ^ ex[ls + lg[a]] if a else b for a, b in zip(x, y)]
        return [b ^ self._slow_mul(s, a) for a, b in zip(x, y)]

    def dot(self, x: Sequence[int], y: Sequence[int]) -> int:
        acc = 0
        if self._log is not None:
            lg, ex = self._log, self._exp
            for a, b in zip(x, y):
                if a and b:
                    acc ^= ex[lg[a] + lg[b]]
            return acc
        for a, b in zip(x, y):
            acc ^= self._slow_mul(a, b)
        return acc

    # -- Frobenius and norms over a subfield -----------------------------

    def contains_subfield(self, base: int) -> bool:
        return base >= 1 and self.degree % base == 0

    def frobenius(self, x: int, base: int, times: int = 1) -> int:
        """x^(q^times) with q = 2^base."""
        if not self.contains_subfield(base):
            raise NonDividingChain(f"F_2^{base} is not a subfield of {self}")
        times %= self.degree // base
        if not x or not times:
            return x
        return self.pow(x, pow(2, base * times, self.order - 1) or (self.order - 1))

    def norm(self, a: int, i: int, base: int) -> int:
        """sigma^{i-1}(a) ... sigma(a) a for sigma the q-Frobenius."""
        acc = 1
        cur = a
        for _ in range(i):
            acc = self.mul(acc, cur)
            cur = self.frobenius(cur, base)
        return acc

    def in_subfield(self, x: int, base: int) -> bool:
        return self.frobenius(x, base) == x

    # -- vectorised helpers over numpy arrays of elements -----------------

    def mul_array(self, arr: np.ndarray, s: int) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64)
        if not s:
            return np.zeros_like(arr)
        if s == 1:
            return arr.copy()
        if self._np_log is None:
            return self._mul_array_bitwise(arr, s)
        out = self._np_exp[self._np_log[arr] + self._log[s]]
        out[arr == 0] = 0
        return out

    def vecmat(self, X: np.ndarray, M: Sequence[Sequence[int]]) -> np.ndarray:
        """Row-vector product applied column-wise: out[j] = sum_i M[i][j] * X[i].

        ``X`` has shape (a, B) holding B independent row vectors of length a.
        """
        X = np.asarray(X, dtype=np.int64)
        a = len(M)
        b = len(M[0]) if a else 0
        if X.shape[0] != a:
            raise ValueError("shape mismatch in vecmat")
        out = np.zeros((b, X.shape[1]), dtype=np.int64)
        if self._np_log is None:
            for i in range(a):
                for j in range(b):
                    if M[i][j]:
                        out[j] ^= self._mul_array_bitwise(X[i], M[i][j])
            return out
        logs = self._np_log[X]
        nz = X != 0
        lg, ex = self._log, self._np_exp
        for i in range(a):
            li, nzi = logs[i], nz[i]
            for j in range(b):
                s = M[i][j]
                if not s:
                    continue
                if s == 1:
                    out[j] ^= X[i]
                else:
                    out[j] ^= np.where(nzi, ex[li + lg[s]], 0)
        return out

    def elements(self) -> range:
        return range(self.order)

    def random_element(self, rng, nonzero: bool = False) -> int:
        lo = 1 if nonzero else 0
        return int(rng.integers(lo, self.order)) if hasattr(rng, "integers") else rng.randrange(lo, self.order)


@functools.lru_cache(maxsize=None)
def gf(degree: int) -> GF2m:
    """Shared field instance for F_{2^degree}."""
    return GF2m(degree)


def primitive_element(degree: int) -> int:
    return gf(degree).generator


# ---------------------------------------------------------------------------
# towers


class _XorSolver:
    """Solve sum of selected vectors = target over F_2, vectors as int masks."""

    def __init__(self, vectors: Sequence[int]):
        self.rows: list[tuple[int, int, int]] = []  # (pivot bit, vector, combination)
        for idx, v in enumerate(vectors):
            combo = 1 << idx
            for piv, rv, rc in self.rows:
                if v >> piv & 1:
                    v ^= rv
                    combo ^= rc
            if not v:
                continue
            piv = v.bit_length() - 1
            # keep the basis fully reduced on its pivots
            new_rows = []
            for p, rv, rc in self.rows:
                if rv >> piv & 1:
                    rv ^= v
                    rc ^= combo
                new_rows.append((p, rv, rc))
            new_rows.append((piv, v, combo))
            self.rows = new_rows
        self.rank = len(self.rows)

    def solve(self, target: int) -> int | None:
        combo = 0
        for piv, rv, rc in self.rows:
            if target >> piv & 1:
                target ^= rv
                combo ^= rc
        return None if target else combo


class FieldTower:
    """All subfields of F_{2^top} with mutually compatible embeddings.

    Every subfield F_{2^d} (d | top) is embedded into the top field by
    sending the class of x to a fixed root of its defining polynomial; maps
    between two proper subfields factor through the top field, so any two
    composition paths agree.
    """

    def __init__(self, top: int, exponents: Iterable[int] = ()):
        exps = sorted(set(exponents) | {top})
        for e in exps:
            if e < 1 or top % e:
                raise NonDividingChain(f"2^{e} is not a subfield size of 2^{top}")
        self.top_degree = top
        self.top = gf(top)
        self.exponents = tuple(exps)
        self._roots: dict[int, list[int]] = {}
        self._solvers: dict[int, _XorSolver] = {}

    def __repr__(self) -> str:
        return f"FieldTower({list(self.exponents)})"

    def field(self, e: int) -> GF2m:
        self._check(e)
        return gf(e)

    def _check(self, e: int) -> None:
        if e < 1 or self.top_degree % e:
            raise NonDividingChain(f"2^{e} is not a subfield size of 2^{self.top_degree}")

    def _powers(self, e: int) -> list[int]:
        """Images in the top field of 1, x, ..., x^{e-1} from F_{2^e}."""
        if e in self._roots:
            return self._roots[e]
        self._check(e)
        T = self.top
        if e == self.top_degree:
            root = 2 if e > 1 else 1
        else:
            p = irreducible_poly(e)
            h = T.pow(T.generator, (T.order - 1) // ((1 << e) - 1))
            root = None
            cand = 1
            for _ in range((1 << e) - 1):
                acc = 0
                for bit in range(e, -1, -1):
                    acc = T.mul(acc, cand) ^ (p >> bit & 1)
                if acc == 0:
                    root = cand
                    break
                cand = T.mul(cand, h)
            if root is None:
                raise NoIrreducibleFound(f"no root of the F_2^{e} modulus in {T}")
        pw = [1]
        for _ in range(e - 1):
            pw.append(T.mul(pw[-1], root))
        self._roots[e] = pw
        self._solvers[e] = _XorSolver(pw)
        return pw

    def to_top(self, x: int, e: int) -> int:
        if e == self.top_degree:
            return x
        pw = self._powers(e)
        acc = 0
        i = 0
        while x:
            if x & 1:
                acc ^= pw[i]
            x >>= 1
            i += 1
        return acc

    def from_top(self, y: int, e: int) -> int:
        if e == self.top_degree:
            return y
        self._powers(e)
        combo = self._solvers[e].solve(y)
        if combo is None:
            raise NotInSubfield(f"element {y} of {self.top} is not in F_2^{e}")
        return combo

    def embed(self, x: int, src: int, dst: int) -> int:
        if dst % src:
            raise NonDividingChain(f"F_2^{src} does not embed in F_2^{dst}")
        if src == dst:
            return x
        return self.from_top(self.to_top(x, src), dst)

    def restrict(self, x: int, src: int, dst: int) -> int:
        """Inverse of ``embed(., dst, src)``; raises NotInSubfield."""
        if src % dst:
            raise NonDividingChain(f"F_2^{dst} is not a subfield of F_2^{src}")
        if src == dst:
            return x
        return self.from_top(self.to_top(x, src), dst)

    def contains(self, x: int, src: int, sub: int) -> bool:
        try:
            self.restrict(x, src, sub)
        except NotInSubfield:
            return False
        return True

    def embed_matrix(self, M: Sequence[Sequence[int]], src: int, dst: int) -> list[list[int]]:
        if src == dst:
            return [list(r) for r in M]
        cache: dict[int, int] = {}
        out = []
        for row in M:
            new = []
            for x in row:
                if x not in cache:
                    cache[x] = self.embed(x, src, dst)
                new.append(cache[x])
            out.append(new)
        return out

    def polynomial_basis(self, sub: int, ext: int) -> "OrderedBasis":
        """{1, a, ..., a^{m-1}} with a the class of x in F_{2^ext}."""
        if ext % sub:
            raise NonDividingChain(f"F_2^{sub} is not a subfield of F_2^{ext}")
        m = ext // sub
        F = gf(ext)
        a = 2 if ext > 1 else 1
        elems = [1]
        for _ in range(m - 1):
            elems.append(F.mul(elems[-1], a))
        return OrderedBasis(self, sub, ext, elems)


def build_tower(chain: Sequence[int]) -> FieldTower:
    """Tower F_{2^e0} < F_{2^e1} < ... from a strictly increasing divisor chain."""
    chain = list(chain)
    if not chain:
        raise NonDividingChain("empty exponent chain")
    for a, b in zip(chain, chain[1:]):
        if b <= a or b % a:
            raise NonDividingChain(f"{a} does not divide {b} (or chain not increasing)")
    if chain[0] < 1:
        raise NonDividingChain("exponents must be positive")
    tower = FieldTower(chain[-1], chain)
    T = tower.top
    for e in chain[:-1]:
        F = gf(e)
        g = F.generator
        # homomorphism on the generator and its successor powers
        img = tower.to_top(g, e)
        if tower.to_top(F.mul(g, g), e) != T.mul(img, img) or tower.to_top(1, e) != 1:
            raise NoIrreducibleFound(f"embedding of F_2^{e} is not multiplicative")
    return tower


# ---------------------------------------------------------------------------
# bases of an extension over a subfield


class OrderedBasis:
    """Ordered basis of F_{2^ext} over its subfield F_{2^sub}."""

    def __init__(self, tower: FieldTower, sub: int, ext: int, elements: Sequence[int]):
        if ext % sub:
            raise NonDividingChain(f"F_2^{sub} is not a subfield of F_2^{ext}")
        self.tower = tower
        self.sub = sub
        self.ext = ext
        self.m = ext // sub
        self.elements = tuple(elements)
        if len(self.elements) != self.m:
            raise ValueError(f"a basis needs {self.m} elements, got {len(self.elements)}")
        F = gf(ext)
        vecs = []
        for beta in self.elements:
            for t in range(sub):
                vecs.append(F.mul(tower.embed(1 << t, sub, ext), beta))
        self._solver = _XorSolver(vecs)
        if self._solver.rank != ext:
            raise ValueError("basis elements are linearly dependent over the subfield")
        self._sub_mask = (1 << sub) - 1
        self._embedded = [tower.embed(c, sub, ext) for c in range(1 << sub)] if sub <= 12 else None

    @property
    def field(self) -> GF2m:
        return gf(self.ext)

    @property
    def base(self) -> GF2m:
        return gf(self.sub)

    def coordinates(self, x: int) -> tuple[int, ...]:
        combo = self._solver.solve(x)
        mask, s = self._sub_mask, self.sub
        return tuple((combo >> (j * s)) & mask for j in range(self.m))

    def combine(self, coords: Sequence[int]) -> int:
        F = gf(self.ext)
        acc = 0
        for c, beta in zip(coords, self.elements):
            if c:
                ce = self._embedded[c] if self._embedded is not None else self.tower.embed(c, self.sub, self.ext)
                acc ^= F.mul(ce, beta)
        return acc

    def matrix_rep(self, v: Sequence[int]) -> list[list[int]]:
        """m x len(v) matrix over the subfield; column j expands v[j]."""
        cols = [self.coordinates(x) for x in v]
        return [[col[i] for col in cols] for i in range(self.m)]

    def from_matrix_rep(self, M: Sequence[Sequence[int]]) -> list[int]:
        if not M:
            return []
        return [self.combine([M[i][j] for i in range(self.m)]) for j in range(len(M[0]))]


def matrix_rep(v: Sequence[int], basis: OrderedBasis) -> list[list[int]]:
    return basis.matrix_rep(v)


def polynomial_basis(sub: int, ext: int, tower: FieldTower | None = None) -> OrderedBasis:
    tower = tower or FieldTower(ext, [sub])
    return tower.polynomial_basis(sub, ext)
