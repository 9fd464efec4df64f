import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from srlrc import linalg
from srlrc.errors import NotInvertibleBlock, TooLarge
from srlrc.gf import FieldTower, gf
from srlrc.linrs import make_linrs
from srlrc.sumrank import (
    codewords,
    general_linear_group,
    gl_order,
    hamming_min_after_recoding,
    hamming_weight,
    is_msrd,
    min_distance,
    min_distance_of_set,
    min_hamming_over_recodings,
    min_hamming_over_recodings_naive,
    partition_for,
    rank_weight_via_matrix,
    sample_recodings,
    sampled_min_distance,
    second_singleton_holds,
    singleton_holds,
    sum_rank_distance,
    sum_rank_weight,
)


def span_dim_by_closure(block, sub, ext):
    """F_q-dimension of the span of ``block``, by generating the whole span."""
    F = gf(ext)
    q = 1 << sub
    sub_elems = [x for x in range(F.order) if F.pow(x, q) == x]
    span = {0}
    for b in block:
        span = {s ^ F.mul(a, b) for s in span for a in sub_elems}
    size = len(span)
    d = 0
    while q**d < size:
        d += 1
    assert q**d == size
    return d


def part(sub, ext, sizes):
    return partition_for(FieldTower(ext, [sub]), sub, ext, sizes)


def test_weight_examples():
    p = part(1, 2, (2, 2))
    assert sum_rank_weight([0, 0, 0, 0], p) == 0
    assert sum_rank_weight([1, 2, 0, 0], p) == 2
    assert sum_rank_weight([2, 2, 0, 0], p) == 1
    assert sum_rank_weight([1, 0, 3, 3], p) == 2


@given(st.sampled_from([(1, 3), (2, 4), (1, 4), (2, 6), (3, 6)]), st.data())
@settings(max_examples=80, deadline=None)
def test_weight_matches_span_closure(fields, data):
    sub, ext = fields
    F = gf(ext)
    sizes = (2, 1, 2)
    p = part(sub, ext, sizes)
    c = [data.draw(st.integers(0, F.order - 1)) for _ in range(sum(sizes))]
    off = [0, 2, 3, 5]
    expect = sum(span_dim_by_closure(c[a:b], sub, ext) for a, b in zip(off, off[1:]))
    assert sum_rank_weight(c, p) == expect == rank_weight_via_matrix(c, p)
    assert sum_rank_weight(c, p) <= hamming_weight(c)


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_distance_is_a_metric(data):
    p = part(1, 4, (2, 2))
    vec = st.lists(st.integers(0, 15), min_size=4, max_size=4)
    a, b, c = data.draw(vec), data.draw(vec), data.draw(vec)
    assert sum_rank_distance(a, a, p) == 0
    assert sum_rank_distance(a, b, p) == sum_rank_distance(b, a, p)
    assert sum_rank_distance(a, c, p) <= sum_rank_distance(a, b, p) + sum_rank_distance(b, c, p)


def test_min_distance_small_cases():
    p = part(1, 2, (1, 1, 1))
    assert min_distance(linalg.identity(3), p) == 1  # whole space
    assert min_distance([[1, 1, 1]], p) == 3  # repetition, Hamming metric
    assert min_distance([], p) == 4


def test_linrs_small_instance_is_msrd():
    code = make_linrs(2, 2, (2, 2), 2)
    G = code.generator
    p = code.partition
    assert min_distance(G, p) == 3
    # set-based oracle on all 256 codewords agrees
    assert min_distance_of_set(codewords(p.field, G), p) == 3
    for k in range(0, 5):
        assert is_msrd(make_linrs(2, 2, (2, 2), k).generator, p)


def test_random_code_usually_not_msrd():
    rng = random.Random(7)
    p = part(2, 4, (2, 2))
    F = p.field
    hits = 0
    for _ in range(5):
        G = [[rng.randrange(16) for _ in range(4)] for _ in range(2)]
        if linalg.rank(F, G) < 2:
            continue
        d = min_distance(G, p)
        assert d <= 3
        hits += d < 3
    assert hits >= 1


def test_cap_is_enforced():
    p = part(2, 4, (2, 2))
    with pytest.raises(TooLarge):
        min_distance(linalg.identity(4), p, cap=1000)


def test_sampled_distance_is_an_upper_bound():
    code = make_linrs(1, 3, (3, ), 1)
    p = code.partition
    d = min_distance(code.generator, p)
    assert sampled_min_distance(code.generator, p, random.Random(1), 200) >= d


def test_singleton_bounds():
    p = part(1, 2, (2, 2))
    for k in range(1, 5):
        d = p.N - k + 1
        assert singleton_holds(4**k, d, p)
        assert not singleton_holds(4**k + 1, d, p)
        assert second_singleton_holds(4**k, d, p)


@pytest.mark.parametrize("q_e,r", [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2)])
def test_general_linear_group_size(q_e, r):
    mats = list(general_linear_group(gf(q_e), r))
    assert len(mats) == gl_order(1 << q_e, r)
    assert len({tuple(map(tuple, A)) for A in mats}) == len(mats)


def test_recoding_identity_dominates():
    code = make_linrs(2, 2, (2, 1), 2)
    p = code.partition
    eye = [linalg.identity(2), linalg.identity(1)]
    dh = hamming_min_after_recoding(code.generator, p, eye)
    assert dh >= min_distance(code.generator, p)
    with pytest.raises(NotInvertibleBlock):
        hamming_min_after_recoding(code.generator, p, [[[1, 1], [1, 1]], [[1]]])


@pytest.mark.parametrize("q_e,m,sizes,k", [(1, 2, (2,), 1), (2, 2, (1, 2), 2), (2, 2, (2, 2), 2), (1, 2, (2,), 2)])
def test_recoding_minimum_equals_sum_rank_distance(q_e, m, sizes, k):
    code = make_linrs(q_e, m, sizes, k)
    p = code.partition
    d = min_distance(code.generator, p)
    assert min_hamming_over_recodings(code.generator, p) == d
    if gl_order(1 << q_e, max(sizes)) ** len(sizes) * (1 << (q_e * m * k)) <= 200000:
        assert min_hamming_over_recodings_naive(code.generator, p) == d


def test_recoding_minimum_for_non_msrd_code():
    # a code that is not MSRD still satisfies min_A d_H(CA) = d_SR(C)
    p = part(1, 2, (2, 1))
    G = [[1, 1, 0], [0, 0, 1]]
    assert min_hamming_over_recodings(G, p) == min_distance(G, p) == min_hamming_over_recodings_naive(G, p)


def test_sampled_recodings_are_invertible():
    p = part(2, 4, (2, 1))
    for blocks in sample_recodings(p, np.random.default_rng(0), 10):
        assert [len(b) for b in blocks] == [2, 1]
        assert all(linalg.rank(p.base, b) == len(b) for b in blocks)


def test_refine_partition():
    p = part(1, 3, (3, 2))
    p2 = p.refine([[2, 1], [2]])
    assert p2.sizes == (2, 1, 2)
    c = [1, 2, 4, 1, 1]
    assert sum_rank_weight(c, p2) >= sum_rank_weight(c, p)


def test_codewords_enumeration_counts():
    F = gf(2)
    G = [[1, 0, 1], [0, 1, 1]]
    words = list(codewords(F, G))
    assert len(words) == 16 and len({tuple(w) for w in words}) == 16
    proj = list(codewords(F, G, projective=True))
    assert len(proj) == (16 - 1) // 3
    full = {tuple(linalg.vecmat(F, list(x), G)) for x in itertools.product(range(4), repeat=2)}
    assert full == {tuple(w) for w in words}
