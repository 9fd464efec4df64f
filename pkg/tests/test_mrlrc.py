import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from srlrc import linalg
from srlrc.errors import InsufficientRank, PreconditionNotSorted, ProfileInvalid
from srlrc.gf import gf
from srlrc.local import make_general, make_mds, product_code
from srlrc.mrlrc import (
    CodeProfile,
    ErasurePattern,
    closed_form_e,
    code_locals,
    construct,
    e_max,
    e_max_bruteforce,
    global_distance,
    global_distance_bruteforce,
    mr_check,
    mr_pattern_count,
    plan_field_size,
    random_outer,
    verify_mr_exhaustive,
)
from srlrc.sumrank import codewords

TINY = CodeProfile.uniform(2, 2, 2, 4, 2, 3)


def test_profile_validation():
    p = CodeProfile.uniform(7, 6, 3, 8, 6, 36)
    assert (p.field_e, p.local_e, p.n, p.N, p.h) == (18, (3,) * 7, 56, 42, 6)
    with pytest.raises(ProfileInvalid, match="q > g required"):
        CodeProfile.uniform(7, 6, 3, 4, 6, 36)
    with pytest.raises(ProfileInvalid, match="power of 2"):
        CodeProfile.uniform(2, 2, 2, 6, 2, 3)
    with pytest.raises(ProfileInvalid, match="m >= max r_i"):
        CodeProfile.uniform(2, 3, 2, 4, 2, 3)
    with pytest.raises(ProfileInvalid, match="1 <= k <= N"):
        CodeProfile.uniform(2, 2, 2, 4, 2, 5)
    with pytest.raises(ProfileInvalid, match="power of q_local"):
        CodeProfile((2, 2), (2, 2), (4, 8), 8, 2, 3)
    with pytest.raises(ProfileInvalid, match="q_local"):
        CodeProfile((3,), (3,), (2,), 4, 3, 2)
    unequal = CodeProfile((3, 3, 6, 6), (2, 2, 3, 3), (2, 2, 8, 8), 8, 6, 12)
    assert unequal.n_i == (4, 4, 8, 8)


def test_example1_code():
    code = construct(CodeProfile.uniform(7, 6, 3, 8, 6, 36))
    assert code.field.degree == 18 and code.n == 56 and code.k == 36
    assert all(c.e == 3 and c.is_mds() for c in code.local_codes)


def test_encode_respects_locality_and_systematic_layout():
    code = construct(CodeProfile.uniform(3, 2, 3, 4, 2, 5))
    rng = random.Random(0)
    msg = [rng.randrange(16) for _ in range(5)]
    c = code.encode(msg)
    for i, grp in enumerate(code.groups):
        A = code.local_codes[i]
        sub = [c[j] for j in grp]
        H = code.tower.embed_matrix(A.parity_check, A.e, code.field.degree)
        assert all(code.field.dot(h, sub) == 0 for h in H)
    cs = code.encode(msg, systematic=[2, 2, 1])
    assert [cs[j] for j in (0, 1, 4, 5, 8)] == msg
    assert code.encode([0] * 5) == [0] * code.n
    assert code.decode(cs, systematic=[2, 2, 1]) == msg


def test_correctable_examples():
    code = construct(TINY)
    assert code.correctable(ErasurePattern.empty(2))
    assert not code.correctable(code.pattern([0, 1, 2, 3]))
    assert code.correctable(code.pattern([0, 1, 3]))


def test_decode_matches_predicate_on_all_patterns():
    code = construct(TINY)
    rng = random.Random(4)
    msg = [rng.randrange(16) for _ in range(3)]
    c = code.encode(msg)
    for bits in range(1 << code.n):
        gone = [j for j in range(code.n) if bits >> j & 1]
        recv = [None if j in gone else x for j, x in enumerate(c)]
        pat = code.pattern(gone)
        ranks = code.survivor_ranks(pat)
        if sum(ranks) >= code.k:
            assert code.decode(recv) == msg
        else:
            with pytest.raises(InsufficientRank):
                code.decode(recv)


def test_cartesian_product_when_h_is_zero():
    prof = CodeProfile((1, 2), (2, 2), (2, 4), 4, 2, 3)
    code = construct(prof)
    F = code.field
    glob = {tuple(c) for c in codewords(F, code.generator)}
    tower = code.tower
    parts = []
    for c in code.local_codes:
        A = tower.embed_matrix(c.generator, c.e, F.degree)
        parts.append({tuple(linalg.vecmat(F, list(x), A)) for x in itertools.product(range(F.order), repeat=c.r)})
    prod = {a + b for a, b in itertools.product(*parts)}
    assert glob == prod
    assert global_distance_bruteforce(code) == min(2, 2) == global_distance(code)


@pytest.mark.parametrize(
    "prof",
    [
        TINY,
        CodeProfile((1, 2), (3, 2), (4, 4), 4, 2, 2),
        CodeProfile((2, 1), (2, 1), (2, 2), 4, 2, 2),
        CodeProfile((2, 2), (1, 3), (4, 4), 4, 2, 3),
    ],
)
def test_construction_is_mr(prof):
    code = construct(prof)
    ok, checked, witness = mr_check(code)
    assert ok and witness is None
    assert checked == mr_pattern_count(code) == math.prod(math.comb(n, d - 1) for n, d in zip(prof.n_i, prof.delta))


def test_random_outer_breaks_mr():
    code = construct(TINY)
    rng = random.Random(0)
    fails = 0
    for _ in range(10):
        bad = construct(TINY, outer_generator=random_outer(code, rng))
        fails += not verify_mr_exhaustive(bad)
    assert fails > 0


def test_delta_one_reduces_to_outer_mds():
    code = construct(CodeProfile.uniform(3, 1, 1, 4, 1, 2))
    assert verify_mr_exhaustive(code)


def test_mr_with_split_group():
    prof = CodeProfile((2, 2), (2, 2), (2, 4), 4, 2, 3)
    split = product_code([make_mds(1, 1, 2), make_mds(1, 1, 2)], 1)
    code = construct(prof, local_codes=[split, make_mds(2, 2, 2)])
    assert code.n_i == (4, 3)
    ok, checked, _ = mr_check(code)
    assert ok and checked == 2 * 2 * 3


def test_e_max_examples():
    code = construct(TINY)
    assert e_max(code_locals(code), 3) == 2
    assert global_distance(code) == global_distance_bruteforce(code) == 3
    ones = [(gf(1), [[1]])] * 5
    for k in range(1, 6):
        assert e_max(ones, k) == 5 - k
    assert e_max(ones, 0) == 5


@given(st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_e_max_matches_bruteforce(seed):
    rng = random.Random(seed)
    local = []
    for _ in range(rng.randint(1, 3)):
        r, d = rng.randint(1, 3), rng.randint(1, 3)
        if rng.random() < 0.5:
            c = make_mds(3, r, d)
        else:
            n = rng.randint(r, 4)
            while True:
                A = [[rng.randrange(4) for _ in range(n)] for _ in range(r)]
                if linalg.rank(gf(2), A) == r:
                    break
            c = make_general(2, A)
        local.append((c.field, c.generator))
    N = sum(len(A) for _, A in local)
    k = rng.randint(1, N)
    assert e_max(local, k) == e_max_bruteforce(local, k)


def test_closed_form():
    for r, d, k in [((2, 3), (3, 2), 4), ((1, 2, 2), (3, 3, 2), 2), ((2, 2, 2), (2, 2, 2), 5)]:
        local = [(gf(3), make_mds(3, a, b).generator) for a, b in zip(r, d)]
        assert closed_form_e(r, d, k) == e_max(local, k)
    with pytest.raises(PreconditionNotSorted):
        closed_form_e((3, 2), (2, 2), 3)


def test_planner():
    rows, best = plan_field_size(31, 6, 3)
    assert rows[0].value == 2**558 and rows[30].value == 2**30 and best == 31
    assert rows[-1].pretty() == "2^30"
    rows7, best7 = plan_field_size(7, 6, 3)
    assert best7 == 7 and rows7[6].value == 2**18
    rows1, best1 = plan_field_size(1, 4, 2)
    assert best1 == 1 and rows1[0].value == 5**4
