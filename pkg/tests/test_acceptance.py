"""Acceptance checks, one per criterion; each prints a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` (lines also appear in
the terminal summary) or ``python tests/test_acceptance.py``.
All tolerances are exact (integer equalities) except the wall-clock
limits stated per criterion.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
import tempfile
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from srlrc import linalg, shards  # noqa: E402
from srlrc.alternant import alternant_code, alternant_global, distance_bracket, verify_bounds  # noqa: E402
from srlrc.cli import main as cli_main  # noqa: E402
from srlrc.errors import InsufficientRank  # noqa: E402
from srlrc.gf import gf  # noqa: E402
from srlrc.linrs import make_linrs, nested_family  # noqa: E402
from srlrc.local import make_mds, product_code  # noqa: E402
from srlrc.mrlrc import (  # noqa: E402
    CodeProfile,
    closed_form_e,
    code_locals,
    construct,
    construct_from_family,
    e_max,
    e_max_bruteforce,
    global_distance_bruteforce,
    mr_check,
    plan_field_size,
)
from srlrc.sumrank import (  # noqa: E402
    codewords,
    gl_order,
    min_distance,
    min_hamming_over_recodings,
    min_hamming_over_recodings_naive,
    partition_for,
)

# pinned limits
C1_SECONDS = 60.0
C2_SECONDS = 300.0
C6_SECONDS = 30.0
C2_MIN_PROFILES = 12
NAIVE_BUDGET = 20000  # recodings x codewords for the literal-product cross-check

RESULTS: list[str] = []


def report(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    RESULTS.append(line)


# ---------------------------------------------------------------------------
# 1. MSRD oracle


def criterion_1():
    t0 = time.time()
    checked = 0
    bad = []
    for q_e in (1, 2, 3):
        q = 1 << q_e
        for m in (1, 2, 3):
            for g in range(1, min(3, q - 1) + 1):
                for sizes in itertools.product(range(1, m + 1), repeat=g):
                    N = sum(sizes)
                    for k in range(1, N + 1):
                        if (q**m) ** k > 1 << 20:
                            break
                        code = make_linrs(q_e, m, sizes, k)
                        d = min_distance(code.generator, code.partition)
                        checked += 1
                        if d != N - k + 1:
                            bad.append((q, m, sizes, k, d))
    dt = time.time() - t0
    ok = not bad and dt < C1_SECONDS
    report(1, ok, f"{checked} LinRS codes, d_SR = N-k+1 for all, {dt:.1f}s (limit {C1_SECONDS:.0f}s); failures={bad[:3]}")
    return ok


# ---------------------------------------------------------------------------
# 2. MR exhaustiveness and the decoding equivalence


MR_PROFILES = [
    CodeProfile((2, 2), (2, 2), (4, 4), 4, 2, 3),
    CodeProfile((2, 2), (3, 3), (4, 4), 4, 2, 3),
    CodeProfile((1, 2), (3, 2), (4, 4), 4, 2, 2),
    CodeProfile((2, 1), (2, 1), (2, 2), 4, 2, 2),
    CodeProfile((2, 2, 2), (2, 2, 1), (2, 2, 4), 4, 2, 4),
    CodeProfile((3, 2), (2, 3), (2, 4), 4, 3, 4),
    CodeProfile((1, 1, 1), (3, 3, 2), (4, 4, 4), 4, 1, 2),
    CodeProfile((3, 3), (2, 2), (2, 2), 4, 3, 5),
    CodeProfile((2, 3), (3, 2), (4, 4), 4, 3, 3),
    CodeProfile((2, 2, 2), (2, 2, 2), (2, 2, 2), 8, 2, 5),
    CodeProfile((3, 3), (3, 2), (8, 2), 8, 3, 4),
    CodeProfile((4,), (3,), (8,), 8, 4, 3),
    CodeProfile((2, 2, 1), (2, 1, 4), (4, 16, 2), 16, 2, 4),
    CodeProfile((1, 1, 1, 1), (2, 2, 2, 2), (2, 2, 2, 2), 8, 1, 2),
]


def _decode_equivalence(code, rng) -> tuple[bool, int]:
    F = code.field
    G = code.generator
    msg = [F.random_element(rng) for _ in range(code.k)]
    c = linalg.vecmat(F, msg, G)
    patterns = 0
    for bits in range(1 << code.n):
        patterns += 1
        gone = [j for j in range(code.n) if bits >> j & 1]
        surv = [j for j in range(code.n) if not bits >> j & 1]
        predicate = code.correctable(code.pattern(gone))
        # information-theoretic truth: the survivors determine the message
        truth = bool(surv) and linalg.rank(F, linalg.columns(G, surv)) == code.k
        recv = [None if bits >> j & 1 else x for j, x in enumerate(c)]
        try:
            decoded = code.decode(recv) == msg
        except InsufficientRank:
            decoded = False
        if not (predicate == truth == decoded):
            return False, patterns
    return True, patterns


def criterion_2():
    t0 = time.time()
    rng = random.Random(2)
    details = []
    ok = len(MR_PROFILES) >= C2_MIN_PROFILES
    unequal_r = unequal_d = unequal_q = False
    for prof in MR_PROFILES:
        assert prof.n <= 10
        code = construct(prof)
        mr, checked, _ = mr_check(code)
        eq, pats = _decode_equivalence(code, rng)
        ok &= mr and eq
        details.append(f"n={prof.n}:{'ok' if mr and eq else 'FAIL'}")
        unequal_r |= len(set(prof.r)) > 1
        unequal_d |= len(set(prof.delta)) > 1
        unequal_q |= len(set(prof.q_local)) > 1
    dt = time.time() - t0
    ok &= unequal_r and unequal_d and unequal_q and dt < C2_SECONDS
    report(2, ok, f"{len(MR_PROFILES)} profiles (n<=10, unequal r/delta/q_i: {unequal_r}/{unequal_d}/{unequal_q}) MR and 2^n-pattern decode<=>predicate, {dt:.1f}s (limit {C2_SECONDS:.0f}s)")
    return ok


# ---------------------------------------------------------------------------
# 3. Hamming distance minimised over block-diagonal recodings


def criterion_3():
    cases = []
    for q_e in (1, 2):
        for m in (1, 2):
            for g in range(1, (1 << q_e)):
                for sizes in itertools.product(range(1, min(2, m) + 1), repeat=g):
                    for k in range(1, sum(sizes) + 1):
                        if (1 << (q_e * m)) ** k <= 4096:
                            cases.append(("linrs", q_e, m, sizes, k))
    rng = random.Random(3)
    # non-MSRD codes as well: the equality holds for every linear code
    for _ in range(6):
        cases.append(("random", 2, 2, (2, 1), 2, rng.randrange(1 << 30)))
    bad = []
    naive = 0
    for case in cases:
        if case[0] == "linrs":
            _, q_e, m, sizes, k = case
            code = make_linrs(q_e, m, sizes, k)
            G, p = code.generator, code.partition
        else:
            _, q_e, m, sizes, k, seed = case
            r2 = random.Random(seed)
            p = partition_for(make_linrs(q_e, m, sizes, 1).tower, q_e, q_e * m, sizes)
            G = [[r2.randrange(1 << (q_e * m)) for _ in range(sum(sizes))] for _ in range(k)]
            if linalg.rank(p.field, G) < k:
                continue
        d = min_distance(G, p)
        got = min_hamming_over_recodings(G, p)
        if got != d:
            bad.append(case)
        if math.prod(gl_order(1 << q_e, r) for r in sizes) * (1 << (q_e * m)) ** k <= NAIVE_BUDGET:
            naive += 1
            if min_hamming_over_recodings_naive(G, p) != d:
                bad.append(("naive",) + case)
    ok = not bad
    report(3, ok, f"{len(cases)} codes with r_i<=2, q<=4: min_A d_H(CA) = d_SR(C) exactly ({naive} also by the literal product over all A); failures={bad[:3]}")
    return ok


# ---------------------------------------------------------------------------
# 4. Global distance and the closed form


def criterion_4():
    brute = 0
    bad = []
    for m in (1, 2):
        for g in (1, 2, 3):
            for r in itertools.product(range(1, m + 1), repeat=g):
                for d in itertools.product((1, 2, 3), repeat=g):
                    for k in range(1, min(sum(r), 3) + 1):
                        prof = CodeProfile(r, d, (4,) * g, 4, m, k)
                        code = construct(prof)
                        want = global_distance_bruteforce(code)
                        got = e_max(code_locals(code), k) + 1
                        brute += 1
                        if want != got:
                            bad.append((r, d, m, k, want, got))
    closed = 0
    for g in (1, 2, 3, 4):
        for r in itertools.combinations_with_replacement(range(1, 5), g):
            for d in itertools.combinations_with_replacement(range(4, 0, -1), g):
                n = sum(a + b - 1 for a, b in zip(r, d))
                if n > 8:
                    continue
                local = [(gf(3), make_mds(3, a, b).generator) for a, b in zip(r, d)]
                for k in range(1, sum(r) + 1):
                    closed += 1
                    if closed_form_e(r, d, k) != e_max_bruteforce(local, k):
                        bad.append(("closed", r, d, k))
    ok = not bad
    report(4, ok, f"d_H = e(A,k)+1 by enumeration on {brute} codes; closed form = brute-force e on {closed} sorted MDS profiles (n<=8); failures={bad[:3]}")
    return ok


# ---------------------------------------------------------------------------
# 5. Planner


def criterion_5():
    rows, best = plan_field_size(31, 6, 3)
    rows7, best7 = plan_field_size(7, 6, 3)
    ok = (
        rows[0].value == 2**558
        and rows[30].value == 2**30
        and best == 31
        and min(r.value for r in rows7) == 2**18
        and rows7[best7 - 1].value == 2**18
        and construct(CodeProfile.uniform(7, 6, 3, 8, 6, 36)).field.order == 2**18
    )
    report(5, ok, f"F(1)={rows[0].pretty()}, F(31)={rows[30].pretty()}, argmin x={best}; g=7 minimum {rows7[best7 - 1].pretty()} (x={best7})")
    return ok


# ---------------------------------------------------------------------------
# 6. The g=7, r=6, delta=3, q=8, m=6, k=36 profile end to end

EX1 = {"g": 7, "r": 6, "delta": 3, "q": 8, "m": 6, "k": 36}


def criterion_6():
    rng = random.Random(6)
    data = rng.randbytes(1 << 20)
    with tempfile.TemporaryDirectory() as tmp:
        t0 = time.time()
        ss = shards.encode_file(shards.parse_config(EX1), data, tmp)
        shards.save(ss, only_changed=False)
        gone = set()
        for i in range(7):
            gone |= {(i, j) for j in rng.sample(range(8), 2)}
        rest = [(i, j) for i in range(7) for j in range(8) if (i, j) not in gone]
        gone |= set(rng.sample(rest, 6))
        for i, j in gone:
            (Path(tmp) / shards.shard_name(i + 1, j + 1)).write_bytes(b"")
        loaded = shards.load(tmp)
        out = shards.decode_file(loaded)
        dt = time.time() - t0
    ok = out == data and len(loaded.erased) == 20 and dt < C6_SECONDS
    report(6, ok, f"1 MiB over F_2^18, {len(gone)} erasures (2 per group + 6), byte-identical={out == data}, {dt:.1f}s (limit {C6_SECONDS:.0f}s)")
    return ok


# ---------------------------------------------------------------------------
# 7. Split and merge


def criterion_7():
    rng = random.Random(7)
    data = rng.randbytes(1 << 16)
    with tempfile.TemporaryDirectory() as tmp:
        ss = shards.encode_file(shards.parse_config(EX1), data, tmp)
        shards.save(ss, only_changed=False)
        before = {p.name: p.read_bytes() for p in Path(tmp).glob("*.shard")}
        rc1 = cli_main(["split-group", "--dir", tmp, "--group", "1", "--parts", "3,3", "--local-q", "2"])
        mid = {p.name: p.read_bytes() for p in Path(tmp).glob("*.shard")}
        others_same = all(mid[n] == before[n] for n in before if not n.startswith("g1_"))
        split = shards.load(tmp)
        layout = split.state.local_codes[0].is_product and [s.n for _, s in split.state.local_codes[0].parts] == [4, 4]
        decodable = shards.decode_file(split) == data
        rc2 = cli_main(["recode", "--dir", tmp, "--group", "1", "--delta", "3", "--local-q", "8"])
        after = {p.name: p.read_bytes() for p in Path(tmp).glob("*.shard")}
    restored = after == before
    # tiny analogue: q=8, m=4, two (6,4) groups over F_8, k=6; split group 1 into two (3,2) XOR codes
    fam = nested_family(3, 4)
    prof = CodeProfile((4, 4), (3, 3), (8, 8), 8, 4, 6)
    mds = make_mds(3, 4, 3)
    mr_before, n_before, _ = mr_check(construct_from_family(fam, prof, [mds, mds]))
    xor = make_mds(1, 2, 2)
    mr_after, n_after, _ = mr_check(construct_from_family(fam, prof, [product_code([xor, xor], 3), mds]))
    ok = rc1 == rc2 == 0 and others_same and layout and decodable and restored and mr_before and mr_after
    report(7, ok, f"split: other groups untouched={others_same}, (4,3)x(4,3) layout={layout}, decodable={decodable}; merge restores bytes={restored}; tiny MR before/after={mr_before}/{mr_after} ({n_before}/{n_after} patterns)")
    return ok


# ---------------------------------------------------------------------------
# 8. Specializations


def _classical_rs(F, k, g):
    pts = [1]
    for _ in range(g - 1):
        pts.append(F.mul(pts[-1], F.generator))
    return [[F.pow(x, j) for x in pts] for j in range(k)]


def criterion_8():
    bad = []
    count = 0
    # r = 1: replicated Reed-Solomon
    for q_e in (2, 3):
        q = 1 << q_e
        F = gf(q_e)
        for g in range(1, q):
            for k in range(1, g + 1):
                if q**k > 4096:
                    break
                ns = [2 + (i % 3) for i in range(g)]
                prof = CodeProfile((1,) * g, tuple(n for n in ns), (2,) * g, q, 1, k)
                code = construct(prof)
                glob = {tuple(c) for c in codewords(F, code.generator)}
                rs = {tuple(c) for c in codewords(F, _classical_rs(F, k, g))}
                rep = {tuple(x for x, n in zip(c, ns) for _ in range(n)) for c in rs}
                count += 1
                if glob != rep:
                    bad.append(("r=1", q, g, k))
    # h = 0: Cartesian product of the local codes
    for prof in [
        CodeProfile((1, 2), (2, 2), (2, 4), 4, 2, 3),
        CodeProfile((2, 1), (3, 1), (4, 4), 4, 2, 3),
        CodeProfile((1, 1, 1), (2, 3, 1), (2, 8, 8), 8, 1, 3),
        CodeProfile((2,), (3,), (8,), 8, 2, 2),
        CodeProfile((3,), (2,), (2,), 2, 3, 3),
    ]:
        code = construct(prof)
        F = code.field
        if F.order**code.k > 4096:
            bad.append(("too large", prof))
            continue
        glob = {tuple(c) for c in codewords(F, code.generator)}
        parts = []
        for c in code.local_codes:
            A = code.tower.embed_matrix(c.generator, c.e, F.degree)
            parts.append({tuple(linalg.vecmat(F, list(x), A)) for x in itertools.product(range(F.order), repeat=c.r)})
        prod = {sum(t, ()) for t in itertools.product(*parts)}
        count += 1
        if glob != prod:
            bad.append(("h=0", prof))
    ok = not bad
    report(8, ok, f"{count} instances (<=4096 codewords): r=1 equals replicated RS, h=0 equals the Cartesian product; failures={bad[:3]}")
    return ok


# ---------------------------------------------------------------------------
# 9. Alternant codes


def criterion_9():
    bad = []
    count = 0
    for m in (1, 2):
        for g in (1, 2, 3):
            for sizes in itertools.product(range(1, m + 1), repeat=g):
                if sum(sizes) > 4:
                    continue
                for designed in range(1, min(3, sum(sizes) + 1) + 1):
                    code = alternant_code(1, 2, m, sizes, designed)
                    rep = verify_bounds(code)
                    count += 1
                    if not rep["ok"]:
                        bad.append((m, sizes, designed, rep))
                        continue
                    if code.k == 0:
                        continue
                    locals_ = [make_mds(1, r, 2) for r in sizes]
                    glob = alternant_global(code, locals_)
                    lo, hi = distance_bracket(glob, code)
                    d = global_distance_bruteforce(glob)
                    if not lo <= d - 1 <= hi:
                        bad.append(("bracket", m, sizes, designed, lo, d, hi))
    ok = not bad
    report(9, ok, f"{count} alternant codes (q0=2, s=2, m<=2, N<=4, delta*<=3): d_SR >= delta*, dim >= N-s(delta*-1), distance bracket holds; failures={bad[:3]}")
    return ok


# ---------------------------------------------------------------------------
# 10. Nested updates and their inverses


def criterion_10():
    rng = random.Random(10)
    data = rng.randbytes(5000)
    extra = rng.randbytes(300)
    prof = {"g": 3, "r": 3, "delta": 2, "q": 8, "m": 4, "k": 6}
    steps_ok = []
    with tempfile.TemporaryDirectory() as tmp:
        d = str(Path(tmp) / "s")
        ss = shards.encode_file(shards.parse_config(prof), data, d)
        shards.save(ss, only_changed=False)
        inv0 = {p.name: p.read_bytes() for p in Path(d).glob("*")}
        xfile = Path(tmp) / "extra.bin"
        xfile.write_bytes(extra)
        script = [
            ["grow-k", "--k", "8", "--input", str(xfile)],
            ["add-group", "--r", "2", "--delta", "3"],
            ["change-locality", "--group", "1", "--r", "4"],
            ["change-locality", "--group", "1", "--r", "3"],
            ["remove-group", "--g", "3"],
            ["shrink-k", "--k", "6"],
        ]
        for s in script:
            rc = cli_main([s[0], "--dir", d] + s[1:])
            cur = shards.load(d)
            good = rc == 0 and shards.decode_file(cur) == data
            if len(cur.segments) > 1:
                good &= shards.decode_file(cur, 1) == extra
            steps_ok.append(good)
        inv1 = {p.name: p.read_bytes() for p in Path(d).glob("*")}
    restored = inv0 == inv1
    ok = all(steps_ok) and restored
    report(10, ok, f"grow-k, add-group, change-locality and inverses: decodable after each step={steps_ok}, inventory restored bit-exactly={restored}")
    return ok


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(crit):
    assert crit()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
