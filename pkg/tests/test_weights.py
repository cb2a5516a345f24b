from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracelab import DomainError, SetFamily
from tracelab.family import down_closure, link
from tracelab.weights import (
    W,
    WeightFn,
    bound_2_1_holds,
    colex_level_counts,
    default_battery,
    family_weight,
    fmt_decimal,
    fmt_rational,
    katona_bound,
    uniform_vertex_weight,
    uniform_weights,
)


@given(st.integers(0, 5000))
def test_level_counts_match_popcount_census(m):
    census = {}
    for r in range(m):
        census[r.bit_count()] = census.get(r.bit_count(), 0) + 1
    counts = colex_level_counts(m)
    assert {k: v for k, v in enumerate(counts) if v} == census


@given(st.integers(0, 2000))
def test_W_is_direct_sum(m):
    assert W(m) == sum((Fraction(1, r.bit_count() + 1) for r in range(m)), Fraction(0))


def test_W_small_values():
    assert W(0) == 0
    assert W(1) == 1
    assert W(4) == Fraction(7, 3)
    assert W(6) == Fraction(19, 6)


def test_weightfn_json_roundtrip_and_monotonicity():
    for f in default_battery():
        g = WeightFn.from_json(f.to_json())
        assert g.table == f.table and g.tail == f.tail
    assert len(default_battery()) >= 4
    with pytest.raises(DomainError):
        WeightFn((1, 2), 0)
    assert WeightFn.threshold(1)(2) == 0
    assert WeightFn.harmonic()(3) == Fraction(1, 4)


hered = st.integers(1, 6).flatmap(
    lambda n: st.builds(
        lambda es: down_closure(SetFamily(n, es)), st.sets(st.integers(0, (1 << n) - 1), max_size=12)
    )
)


@given(hered, st.sampled_from(default_battery()))
def test_katona_bound_holds_on_random_hereditary_families(f, fn):
    assert family_weight(f, fn) >= katona_bound(len(f), fn)


@given(hered)
def test_uniform_weights_sum_to_nonempty_edges(f):
    ws = uniform_weights(f)
    assert sum(ws) == len([e for e in f.edges if e])


def test_uniform_vertex_weight_is_link_weight():
    f = down_closure(SetFamily.from_sets(3, [[0, 1, 2]]))
    assert uniform_vertex_weight(f, 0) == W(4)
    assert uniform_vertex_weight(f, 0) == family_weight(link(f, 0), WeightFn.harmonic())


def test_bound_2_1():
    b = bound_2_1_holds(4, 2)
    assert b.lhs == Fraction(19, 6)
    assert b.holds and not b.outside_estimate_range
    assert bound_2_1_holds(5, 1).outside_estimate_range
    with pytest.raises(DomainError):
        bound_2_1_holds(4, 5)


def test_formatting():
    assert fmt_rational(Fraction(-3, 4)) == "-3/4"
    assert fmt_decimal(Fraction(1, 3)) == "0.333333"
