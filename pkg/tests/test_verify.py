from fractions import Fraction

import pytest

from tracelab import DomainError, HereditaryFamily
from tracelab.constructions import construct_5_1, construct_f0
from tracelab.errors import ResourceLimitError
from tracelab.verify import (
    CheckReport,
    Counterexample,
    check_bound_2_1,
    check_katona,
    check_lemma_2_1,
    check_lemma_3_1,
    check_lemma_3_2,
    classify,
    max_disjoint_light,
    replay_weights,
)
from tracelab.weights import WeightFn


def test_katona_small():
    rep = check_katona(4, jobs=1)
    assert rep.ok and rep.examined > 0 and rep.min_slack == 0


def test_katona_detects_an_injected_violation():
    with pytest.raises(DomainError):
        WeightFn((0, 1), 1)
    # smuggle in f(k) = k past validation: the star {0,1,2} beats R(4)
    bad = object.__new__(WeightFn)
    object.__setattr__(bad, "table", (Fraction(0), Fraction(1), Fraction(2), Fraction(3)))
    object.__setattr__(bad, "tail", Fraction(4))
    object.__setattr__(bad, "name", "k")
    rep = check_katona(3, fns=[bad], jobs=1)
    assert rep.status == "fail"
    assert rep.counterexample.lhs < rep.counterexample.rhs


def test_lemma_3_1_cases():
    rep = check_lemma_3_1(4, 2, n_max=4, jobs=1)
    assert rep.ok and rep.examined > 0
    assert rep.details["clause_iii_instances"] > 0
    assert check_lemma_3_1(6, 1, n_max=5).status == "skipped"
    with pytest.raises(DomainError):
        check_lemma_3_1(3, 1)
    with pytest.raises(ResourceLimitError):
        check_lemma_3_1(4, 1, n_max=7)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_lemma_3_2_sweep(d):
    rep = check_lemma_3_2(d, jobs=1)
    assert rep.ok, rep.to_json()


def test_lemma_2_1_three():
    rep = check_lemma_2_1(3)
    assert rep.ok and rep.examined > 0


def test_bound_2_1_flags_c1():
    rep = check_bound_2_1(4, 8)
    assert rep.ok
    assert rep.details


def test_report_serialisation():
    rep = CheckReport("x", {"a": 1})
    assert rep.to_json()["pass"] is True and "runtime" not in rep.to_json()
    rep.fail(Counterexample(HereditaryFamily(1, [0, 1]), "1 >= 2", Fraction(1), Fraction(2)))
    out = rep.to_json(include_timing=True)
    assert out["status"] == "fail" and out["counterexample"]["lhs"] == "1/1" and "runtime" in out
    with pytest.raises(ValueError):
        CheckReport("x", {}, status="maybe")


def test_max_disjoint_light_is_exact():
    # path 0-1-2-3: neighbourhoods {0,1},{0,1,2},{1,2,3},{2,3}
    nbhd = [0b0011, 0b0111, 0b1110, 0b1100]
    assert max_disjoint_light([0, 1, 2, 3], nbhd) == [0, 3]
    assert max_disjoint_light([1, 2], nbhd) == [1]
    assert max_disjoint_light([], nbhd) == []


def test_replay_main_scheme_on_f0():
    f = construct_f0(8, 2, 16)
    rep = replay_weights(f, 8, 2, "main")
    assert rep.ok, rep.details.get("violations")
    assert rep.details["cluster_averages"] == {"L1:0": "127/4", "L1:8": "127/4"}
    assert Fraction(rep.details["total_weight"]) <= 1 + len(f)


def test_replay_rejects_outside_hypotheses():
    f = construct_5_1(5, 1)
    rep = replay_weights(f, 5, 4, "small-c")
    assert rep.status == "rejected" and "min degree" in rep.reason
    forced = replay_weights(f, 5, 4, "small_c", enforce_hypotheses=False)
    assert forced.status == "rejected"
    cls = forced.classification
    assert cls.heavy == list(range(10)) and cls.light == []
    with pytest.raises(ValueError):
        replay_weights(f, 5, 4, "other")


def test_classify_main():
    cls = classify(construct_f0(4, 2, 8), 4, 2, "main")
    assert cls.L1 == [0, 4] and cls.heavy == [] and cls.vertex_class == ["L1"] * 8
