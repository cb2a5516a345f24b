import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracelab import DomainError, HereditaryFamily, SetFamily
from tracelab.errors import CapacityError
from tracelab.family import (
    colex_cmp,
    colex_initial,
    colex_rank,
    colex_unrank,
    degree,
    degrees,
    disjoint_union,
    down_closure,
    elements_of,
    find_shattered,
    from_text,
    is_hereditary,
    level_profile,
    link,
    load_family,
    mask_of,
    min_degree,
    neighborhood,
    power_set,
    relabel,
    restrict,
    save_family,
    support,
    to_text,
    trace,
)

families = st.integers(1, 6).flatmap(
    lambda n: st.builds(lambda es: SetFamily(n, es), st.sets(st.integers(0, (1 << n) - 1), max_size=20))
)


def test_mask_roundtrip():
    assert mask_of([0, 2, 5]) == 0b100101
    assert elements_of(0b100101) == [0, 2, 5]
    with pytest.raises(CapacityError):
        mask_of([64])


def test_constructor_rejects_out_of_range_edges():
    with pytest.raises(DomainError):
        SetFamily(2, [0b100])


def test_hereditary_family_checks_closure():
    HereditaryFamily(2, [0, 1, 2, 3])
    with pytest.raises(DomainError):
        HereditaryFamily(2, [0, 3])


def test_trace_and_link_on_triangle():
    f = HereditaryFamily.from_sets(3, [[], [0], [1], [2], [0, 1], [1, 2]])
    assert sorted(trace(f, 0b011).edges) == [0, 1, 2, 3]
    # restricted link: only the edges through the vertex
    assert link(f, 1).sets() == [[], [0], [2]]
    assert degrees(f) == [2, 3, 2]
    assert degree(f, 1) == 3
    assert min_degree(f) == 2
    assert neighborhood(f, 0) == 0b011
    assert support(f) == 0b111
    assert restrict(f, 0b011).sets() == [[], [0], [1], [0, 1]]


def test_min_degree_counts_isolated_vertices():
    assert min_degree(HereditaryFamily(3, [0, 1])) == 0
    assert min_degree(SetFamily(0, [0])) == 0


def test_colex_order_is_integer_order():
    assert colex_cmp(0b011, 0b100) == -1
    assert colex_rank(0b101) == 5
    assert colex_unrank(6) == 0b110
    r = colex_initial(5)
    assert r.n == 3 and r.sets() == [[], [0], [1], [0, 1], [2]]
    assert colex_initial(0).n == 0 and len(colex_initial(0)) == 0
    with pytest.raises(CapacityError):
        colex_initial(9, n=3)


@given(st.integers(0, (1 << 64) - 1))
def test_rank_unrank_roundtrip(x):
    assert colex_unrank(colex_rank(x)) == x


@given(st.integers(0, 300))
def test_colex_initial_is_hereditary(m):
    assert is_hereditary(colex_initial(m))


@given(families)
def test_down_closure_is_least_hereditary_superset(f):
    g = down_closure(f)
    assert is_hereditary(g)
    assert set(f.edges) <= set(g.edges)
    assert down_closure(g) == g


@given(families)
def test_json_and_text_roundtrip(f):
    assert SetFamily.from_dense(f.n, f.dense) == f
    assert from_text(to_text(f)) == f
    obj = json.loads(json.dumps(f.to_json()))
    assert obj["version"] == 1
    from tracelab.family import family_from_json

    assert family_from_json(obj) == f


@given(families)
def test_pickle_roundtrip(f):
    import pickle

    g = pickle.loads(pickle.dumps(down_closure(f)))
    assert g == down_closure(f) and isinstance(g, HereditaryFamily)


def test_save_and_load(tmp_path):
    f = power_set(3)
    save_family(f, tmp_path / "f.json")
    g = load_family(tmp_path / "f.json", hereditary=True)
    assert g == f and isinstance(g, HereditaryFamily)


def test_find_shattered():
    f = power_set(3, 0b011)
    assert find_shattered(f, 2) == 0b011
    assert find_shattered(f, 3) is None
    assert find_shattered(f, 0) == 0


@given(families, st.randoms())
def test_relabel_preserves_profile(f, rnd):
    perm = list(range(f.n))
    rnd.shuffle(perm)
    g = relabel(f, perm)
    assert level_profile(g) == level_profile(f)
    assert sorted(degrees(g)) == sorted(degrees(f))


def test_disjoint_union_merges_empty_set():
    a = power_set(2)
    u = disjoint_union(a, a)
    assert u.n == 4 and len(u) == 7
    assert isinstance(u, HereditaryFamily)
