import numpy as np
import pytest

import oracles
from tracelab import DomainError, HereditaryFamily
from tracelab.enumeration import (
    DEDEKIND,
    CountReducer,
    EnumFilter,
    MinEdgesByDegreeReducer,
    MinEdgesReducer,
    all_families,
    dedup_isomorphic,
    enumerate_downsets,
    fold_downsets,
    iter_blocks,
    iter_downsets,
)
from tracelab.errors import ResourceLimitError
from tracelab.family import degrees, is_hereditary


@pytest.mark.parametrize("n", range(5))
def test_matches_brute_force_filter(n, hereditary_by_n):
    assert sorted(iter_downsets(n)) == sorted(hereditary_by_n[n])


@pytest.mark.parametrize("n", range(6))
def test_matches_rank_recursion(n):
    assert sorted(iter_downsets(n)) == sorted(oracles.rank_recursion(n))


@pytest.mark.parametrize("n", range(7))
def test_dedekind_counts(n):
    assert fold_downsets(n, EnumFilter(), CountReducer(), jobs=1).value == DEDEKIND[n]


@pytest.mark.parametrize("delta", [1, 2, 3, 5])
def test_degree_filter_matches_postfilter(delta):
    n = 5
    want = sorted(b for b in oracles.rank_recursion(n) if min(oracles.degrees_of(n, b)) >= delta)
    got = sorted(iter_downsets(n, EnumFilter(min_degree=delta)))
    assert got == want
    assert all(EnumFilter(min_degree=delta).accepts(n, b) for b in got)


def test_edge_filters_and_spanning():
    n = 4
    got = list(iter_downsets(n, EnumFilter(min_edges=5, max_edges=8, require_spanning=True)))
    for bits in got:
        f = HereditaryFamily.from_dense(n, bits)
        assert 5 <= len(f) <= 8 and min(degrees(f)) >= 1
    want = [b for b in oracles.rank_recursion(n) if 5 <= b.bit_count() <= 8 and min(oracles.degrees_of(n, b)) >= 1]
    assert sorted(got) == sorted(want)
    with pytest.raises(DomainError):
        EnumFilter(min_edges=3, max_edges=2)


def test_block_statistics_agree_with_families():
    n = 4
    for block in iter_blocks(n):
        for f, e, deg in zip(block.families(), block.edge_counts(), block.degrees()):
            fam = HereditaryFamily.from_dense(n, int(f))
            assert len(fam) == e
            assert list(deg) == degrees(fam)


def test_visitor_can_stop_early():
    seen = []
    res = enumerate_downsets(4, visitor=lambda b: seen.append(b) or len(seen) < 10)
    assert not res.complete and res.count == 10


@pytest.mark.parametrize("reducer", [CountReducer(), MinEdgesReducer(), MinEdgesByDegreeReducer()])
def test_parallel_fold_equals_sequential(reducer):
    filt = EnumFilter(min_degree=2)
    one = fold_downsets(5, filt, reducer, jobs=1)
    many = fold_downsets(5, filt, reducer, jobs=4)
    assert one.value == many.value and one.examined == many.examined and many.complete


def test_min_edges_reducer_returns_least_bits():
    size, bits = fold_downsets(3, EnumFilter(min_degree=2), MinEdgesReducer(), jobs=1).value
    cands = [b for b in oracles.rank_recursion(3) if min(oracles.degrees_of(3, b)) >= 2]
    best = min(b.bit_count() for b in cands)
    assert size == best
    assert bits == min(b for b in cands if b.bit_count() == best)


def test_deadline_marks_partial():
    res = fold_downsets(6, EnumFilter(), CountReducer(), jobs=1, deadline=0.0)
    assert not res.complete and res.value < DEDEKIND[6]


def test_size_guards():
    with pytest.raises(ResourceLimitError):
        list(iter_downsets(7))
    with pytest.raises(ResourceLimitError):
        all_families(5)
    assert all_families(2).dtype == np.uint64 and len(all_families(2)) == 16


def test_dedup_isomorphic_counts_unlabelled_downsets():
    # unlabelled down-sets on 3 points: 10 (OEIS A003182 counts with the empty family)
    reps = dedup_isomorphic(3, iter_downsets(3))
    assert len(reps) == 10
    assert all(is_hereditary(HereditaryFamily.from_dense(3, b)) for b in reps)
