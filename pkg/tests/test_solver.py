import time

import pytest

import oracles
from tracelab import DomainError, HereditaryFamily
from tracelab.bnb import min_family
from tracelab.constructions import construct_powerset_blocks
from tracelab.errors import CertificateError, NoTheoremError, ResourceLimitError
from tracelab.family import power_set
from tracelab.solver import (
    ArrowQuery,
    SolveResult,
    arrows_decision,
    formulas_for,
    m_exact,
    m_exact_profile,
    m_formula,
    m_from_arrowing,
    subadditive_combine,
    upper_bound_from_witness,
)

CASES = [(n, s) for n in range(1, 5) for s in range((1 << (n - 1)) + 1)]


@pytest.mark.parametrize("n,s", CASES)
def test_exhaustive_matches_brute_force(n, s, hereditary_by_n):
    res = m_exact(n, s, jobs=1)
    assert res.value == oracles.brute_m(n, s, hereditary_by_n[n])
    assert res.optimal


@pytest.mark.parametrize("n,s", CASES)
def test_backends_and_definition_agree(n, s):
    exh = m_exact(n, s, "exhaustive", jobs=1).value
    assert m_exact(n, s, "bnb").value == exh
    assert m_from_arrowing(n, s) == exh
    assert m_from_arrowing(n, s, hereditary_only=True) == exh


@pytest.mark.parametrize("s", range(17))
def test_bnb_matches_exhaustive_at_five(s):
    assert m_exact(5, s, "bnb").value == m_exact(5, s, jobs=1).value


def test_witness_is_certificate():
    res = m_exact(4, 3, jobs=1)
    w = res.witness
    assert len(w) == res.value + 1
    assert min(oracles.degrees_of(4, w.dense)) >= 4
    res.validate()


def test_witness_is_least_dense_optimum():
    res = m_exact(3, 1, jobs=1)
    cands = [b for b in oracles.rank_recursion(3) if min(oracles.degrees_of(3, b)) >= 2]
    best = min(b.bit_count() for b in cands)
    assert res.witness.dense == min(b for b in cands if b.bit_count() == best)


def test_never_fails_and_trivial_cases():
    res = m_exact(3, 4)
    assert res.never_fails and res.value == 8 and res.witness is None
    zero = m_exact(0, 0)
    assert zero.value == 0 and zero.witness == HereditaryFamily(0, [0])
    with pytest.raises(DomainError):
        m_exact(3, -1)
    with pytest.raises(DomainError):
        m_exact(3, 1, backend="magic")
    with pytest.raises(ResourceLimitError):
        m_exact(7, 1)


def test_validate_catches_tampering():
    res = m_exact(3, 1, jobs=1)
    bad = SolveResult(res.n, res.s, res.value - 1, res.witness, True, res.backend)
    with pytest.raises(CertificateError):
        bad.validate()


def test_profile_matches_pointwise():
    prof = m_exact_profile(4, jobs=1)
    assert {s: r.value for s, r in prof.items()} == {s: m_exact(4, s).value for s in range(8)}


def test_bnb_timeout_keeps_incumbent():
    inc = construct_powerset_blocks(2, 8)  # m(8,1) <= 12 witness
    res = m_exact(8, 1, "bnb", timeout=0.0, incumbent=inc)
    assert res.value is not None and res.value <= 12
    with pytest.raises(CertificateError):
        m_exact(4, 3, "bnb", incumbent=power_set(4, 0b0011))
    with pytest.raises(ResourceLimitError):
        min_family(9, 2)


def test_bnb_seven_moderate():
    start = time.perf_counter()
    res = m_exact(7, 7, "bnb")
    assert res.optimal and res.value == min_family(7, 8).size - 1
    assert time.perf_counter() - start < 30


def test_arrows_decisions():
    res = arrows_decision(ArrowQuery(3, 4, 2, 4))
    assert res.holds is False and len(res.counterexample) >= 4
    # the least dense counterexample: the first four colex ranks without a shattered pair
    assert res.counterexample.edges == (0, 1, 2, 4)
    assert arrows_decision(ArrowQuery(3, 6, 2, 4)).holds
    assert arrows_decision(ArrowQuery(3, 4, 2, 4, hereditary_only=True)).holds is False
    with pytest.raises(DomainError):
        ArrowQuery(3, 9, 2, 2)
    with pytest.raises(ResourceLimitError):
        arrows_decision(ArrowQuery(5, 3, 2, 2))


@pytest.mark.parametrize("n,m,a,b", [(3, 5, 2, 3), (3, 6, 2, 4), (4, 7, 2, 4), (4, 9, 3, 6), (2, 3, 1, 2)])
def test_arrows_matches_brute(n, m, a, b):
    fams = list(range(1 << (1 << n)))
    assert arrows_decision(ArrowQuery(n, m, a, b)).holds == oracles.arrows_brute(n, m, a, b, fams)


def test_formula_values_and_errors():
    f = m_formula(5, 4, 10)
    assert (f.value, f.s, f.source) == (56, 12, "thm_1_4")
    assert m_formula(2, 1, 4).value == 6
    assert m_formula(3, 1, 6).value == 14
    with pytest.raises(DomainError):
        m_formula(3, 1, 4)
    with pytest.raises(DomainError):
        m_formula(3, 5, 6)
    with pytest.raises(NoTheoremError):
        m_formula(5, 6, 10)


def test_cross_parametrization_is_flagged():
    f = m_formula(3, 3, 6)
    assert "cross_parametrization" in f.caveats
    assert (2, 1, 9) in f.conflicts
    assert {(c.d, c.c, c.value) for c in formulas_for(6, 1)} == {(2, 1, 9), (3, 3, 10)}


def test_upper_bound_and_subadditivity():
    r = m_exact(2, 1)
    ub = upper_bound_from_witness(r.witness, 1)
    assert ub.bound == 3
    combo = subadditive_combine(r, r)
    assert combo.bound == 7 and combo.witness_bound == 6
    assert m_exact(4, 1).value <= combo.witness_bound
    with pytest.raises(CertificateError):
        upper_bound_from_witness(power_set(3, 0b011), 1)
