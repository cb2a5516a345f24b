"""Exact values of m(n,s), the arrowing decision, theorem formulas and witness bounds.

m(n,s) is computed as one less than the fewest edges of a hereditary family on
``n`` labelled vertices whose every degree is at least ``s+1``. Deleting a
vertex ``x`` from a hereditary family loses exactly ``deg(x)`` traces, and
peeling maximal edges off a violating family lowers its size and every degree
by at most one per step, which turns the arrowing definition into this
min-edge search. The equivalence is not assumed: ``m_from_arrowing`` evaluates
the definition directly and the test suite compares the two.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterator

import numpy as np

from . import bnb
from .enumeration import (
    TABLE_LIMIT,
    EnumFilter,
    MinEdgesByDegreeReducer,
    MinEdgesReducer,
    NO_FILTER,
    all_families,
    fold_downsets,
    iter_blocks,
    popcount,
    subset_masks,
)
from .errors import CertificateError, DomainError, NoTheoremError, ResourceLimitError
from .family import (
    HereditaryFamily,
    SetFamily,
    disjoint_union,
    family_to_json,
    is_hereditary,
    min_degree,
)

EXHAUSTIVE_LIMIT = 6
BACKENDS = {
    "exhaustive": "exhaustive",
    "enum": "exhaustive",
    "bnb": "branch_and_bound",
    "branch_and_bound": "branch_and_bound",
}


def _feasible(n: int, s: int) -> bool:
    return n == 0 or s + 1 <= 1 << (n - 1)


@dataclass
class SolveResult:
    """An exact (``optimal=True``) or upper-bound value of m(n,s) with its witness.

    ``never_fails`` marks ``s+1 > 2^(n-1)``: no family reaches that degree, so
    arrowing holds for every ``m`` and ``value`` is reported as ``2^n``.
    """

    n: int
    s: int
    value: int | None
    witness: HereditaryFamily | None
    optimal: bool
    backend: str
    never_fails: bool = False
    stats: dict = field(default_factory=dict)

    def validate(self) -> None:
        """Re-check the witness from scratch; raises :class:`CertificateError`."""
        if self.never_fails:
            if self.witness is not None or self.value != 1 << self.n:
                raise CertificateError("never-failing result must have value 2^n and no witness")
            return
        if self.witness is None:
            if self.value is not None:
                raise CertificateError("value without witness")
            return
        w = self.witness
        if w.n != self.n:
            raise CertificateError("witness ground size differs from n")
        if not is_hereditary(w):
            raise CertificateError("witness is not hereditary")
        if len(w) != self.value + 1:
            raise CertificateError(f"witness has {len(w)} edges, expected {self.value + 1}")
        if self.n and min_degree(w) < self.s + 1:
            raise CertificateError(f"witness min degree {min_degree(w)} < {self.s + 1}")

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "n": self.n,
            "s": self.s,
            "value": self.value,
            "optimal": self.optimal,
            "backend": self.backend,
            "never_fails": self.never_fails,
            "witness": None if self.witness is None else family_to_json(self.witness),
            "stats": {k: v for k, v in self.stats.items() if k != "millis"},
        }
        if include_timing:
            out["millis"] = self.stats.get("millis")
        return out


def _result_from_bits(n, s, size, bits, optimal, backend, stats) -> SolveResult:
    if bits is None:
        return SolveResult(n, s, None, None, optimal, backend, stats=stats)
    witness = HereditaryFamily.from_dense(n, int(bits))
    return SolveResult(n, s, size - 1, witness, optimal, backend, stats=stats)


def m_exact(
    n: int,
    s: int,
    backend: str = "exhaustive",
    jobs: int | None = None,
    timeout: float | None = None,
    incumbent: HereditaryFamily | None = None,
) -> SolveResult:
    """Compute m(n,s) with a minimal witness.

    ``backend`` is ``"exhaustive"`` (alias ``"enum"``, n <= 6) or ``"bnb"``
    (n <= 8, up to 10 with a timeout). A timeout yields ``optimal=False`` and the
    best witness found so far, if any. ``incumbent`` seeds branch and bound with
    a known feasible family.
    """
    if n < 0 or s < 0:
        raise DomainError("n and s must be non-negative")
    try:
        backend = BACKENDS[backend]
    except KeyError:
        raise DomainError(f"unknown backend {backend!r}") from None
    start = time.perf_counter()
    if n == 0:
        # no vertex to delete: the single family {∅} is the convention
        res = SolveResult(0, s, 0, HereditaryFamily(0, [0]), True, backend)
    elif not _feasible(n, s):
        res = SolveResult(n, s, 1 << n, None, True, backend, never_fails=True)
    elif backend == "exhaustive":
        if n > EXHAUSTIVE_LIMIT:
            raise ResourceLimitError(f"exhaustive backend is limited to n <= {EXHAUSTIVE_LIMIT}")
        deadline = None if timeout is None else time.time() + timeout
        fold = fold_downsets(n, EnumFilter(min_degree=s + 1), MinEdgesReducer(), jobs, deadline=deadline)
        size, bits = fold.value if fold.value is not None else (None, None)
        res = _result_from_bits(
            n, s, size, bits, fold.complete, backend, {"examined": fold.examined}
        )
    else:
        deadline = None if timeout is None else time.time() + timeout
        seed = None
        if incumbent is not None:
            if incumbent.n != n or min_degree(incumbent) < s + 1 or not is_hereditary(incumbent):
                raise CertificateError("incumbent is not a valid witness for (n, s)")
            seed = incumbent.dense
        out = bnb.min_family(n, s + 1, deadline, seed)
        res = _result_from_bits(n, s, out.size, out.bits, out.optimal, backend, {"nodes": out.nodes})
    res.stats["millis"] = round((time.perf_counter() - start) * 1000)
    res.validate()
    return res


def m_exact_profile(n: int, jobs: int | None = None) -> dict[int, SolveResult]:
    """m(n,s) for every ``0 <= s < 2^(n-1)`` from one exhaustive pass (n <= 6)."""
    if not 1 <= n <= EXHAUSTIVE_LIMIT:
        raise ResourceLimitError(f"profiles need 1 <= n <= {EXHAUSTIVE_LIMIT}")
    fold = fold_downsets(n, NO_FILTER, MinEdgesByDegreeReducer(), jobs)
    best_at = fold.value
    out = {}
    for s in range((1 << (n - 1))):
        cands = [v for t, v in best_at.items() if t >= s + 1]
        size, bits = min(cands)
        res = _result_from_bits(n, s, size, bits, True, "exhaustive", {"examined": fold.examined})
        res.validate()
        out[s] = res
    return out


# -- arrowing ------------------------------------------------------------------

@dataclass(frozen=True)
class ArrowQuery:
    """``(n, m) -> (a, b)``: every family with at least ``m`` edges has an ``a``-set with ``b`` traces."""

    n: int
    m: int
    a: int
    b: int
    hereditary_only: bool = False

    def __post_init__(self) -> None:
        if min(self.n, self.m, self.a) < 0:
            raise DomainError("n, m, a must be non-negative")
        if self.a > self.n:
            raise DomainError("a must not exceed n")
        if self.m > 1 << self.n:
            raise DomainError("m must not exceed 2^n")


@dataclass(frozen=True)
class ArrowResult:
    holds: bool
    counterexample: SetFamily | None
    examined: int


@lru_cache(maxsize=None)
def _general_trace_sizes(n: int) -> np.ndarray:
    """``sizes[t, F]`` = number of traces of family ``F`` on the set ``t`` (all families, n <= 4)."""
    fams = all_families(n)
    one = np.uint64(1)
    out = np.zeros((1 << n, len(fams)), dtype=np.uint8)
    for t in range(1 << n):
        tr = np.zeros_like(fams)
        for r in range(1 << n):
            tr |= ((fams >> np.uint64(r)) & one) << np.uint64(r & t)
        out[t] = popcount(tr)
    out.setflags(write=False)
    return out


def _sets_of_size(n: int, a: int) -> list[int]:
    return [sum(1 << i for i in c) for c in combinations(range(n), a)]


def _general_max_trace(n: int, a: int) -> tuple[np.ndarray, np.ndarray]:
    sizes = _general_trace_sizes(n)
    rows = sizes[_sets_of_size(n, a)]
    return popcount(all_families(n)), rows.max(axis=0).astype(np.int64)


def _hereditary_blocks(n: int, a: int) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Per block: (families, edge counts, max trace size over ``a``-sets)."""
    if n > TABLE_LIMIT:
        raise ResourceLimitError("hereditary arrowing is limited to n <= 6")
    sub = subset_masks(n)
    ts = [np.uint64(sub[t]) for t in _sets_of_size(n, a)]
    for block in iter_blocks(n):
        fams = np.asarray(block.families(), dtype=np.uint64)
        best = np.zeros(len(fams), dtype=np.int64)
        for t in ts:
            # the trace of a down-set on T is the set of its edges inside T
            np.maximum(best, popcount(fams & t), out=best)
        yield fams, popcount(fams), best


def arrows_decision(q: ArrowQuery) -> ArrowResult:
    """Decide ``(n,m) -> (a,b)`` by scanning every (hereditary, if flagged) family.

    On failure the counterexample is the least one as a dense bitset, i.e. the
    first in colex-of-sorted-rank order.
    """
    if q.hereditary_only:
        best = None
        examined = 0
        for fams, edges, tr in _hereditary_blocks(q.n, q.a):
            examined += len(fams)
            bad = fams[(edges >= q.m) & (tr < q.b)]
            if len(bad):
                cand = int(bad.min())
                best = cand if best is None else min(best, cand)
        if best is None:
            return ArrowResult(True, None, examined)
        return ArrowResult(False, HereditaryFamily.from_dense(q.n, best), examined)
    if q.n > 4:
        raise ResourceLimitError("arrowing over all families is limited to n <= 4")
    edges, tr = _general_max_trace(q.n, q.a)
    bad = np.flatnonzero((edges >= q.m) & (tr < q.b))
    if len(bad):
        return ArrowResult(False, SetFamily.from_dense(q.n, int(bad[0])), len(edges))
    return ArrowResult(True, None, len(edges))


def m_from_arrowing(n: int, s: int, hereditary_only: bool = False) -> int:
    """m(n,s) straight from the definition: the largest ``m0`` with
    ``(n,m) -> (n-1, m-s)`` for all ``m <= m0``; ``2^n`` if it never fails.

    A family with ``k`` edges and best ``(n-1)``-trace ``t`` defeats exactly the
    ``m`` in ``(t+s, k]``, so the first failure is ``min(t+s+1)`` over families
    with ``k > t+s``.
    """
    if n < 1 or s < 0:
        raise DomainError("need n >= 1 and s >= 0")
    first_fail = None
    if hereditary_only:
        for _, edges, tr in _hereditary_blocks(n, n - 1):
            hit = tr[edges > tr + s]
            if len(hit):
                cand = int(hit.min()) + s + 1
                first_fail = cand if first_fail is None else min(first_fail, cand)
    else:
        edges, tr = _general_max_trace(n, n - 1)
        hit = tr[edges > tr + s]
        if len(hit):
            first_fail = int(hit.min()) + s + 1
    return 1 << n if first_fail is None else first_fail - 1


# -- theorem formulas ----------------------------------------------------------

@dataclass(frozen=True)
class FormulaClaim:
    """``m(n, 2^(d-1) - c) = n(2^d - c)/d`` as asserted by one of the theorems.

    ``conflicts`` lists other covered ``(d', c', value)`` with ``d' | n`` and the
    same ``s`` whose value differs.
    """

    d: int
    c: int
    n: int
    s: int
    value: int
    source: str
    caveats: tuple[str, ...] = ()
    conflicts: tuple[tuple[int, int, int], ...] = ()

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "c": self.c,
            "n": self.n,
            "s": self.s,
            "value": self.value,
            "source": self.source,
            "caveats": list(self.caveats),
            "conflicts": [{"d": d, "c": c, "value": v} for d, c, v in self.conflicts],
        }


def _source(d: int, c: int) -> str | None:
    if c in (1, 2):
        return "thm_1_2"
    if d >= 4 * c:
        return "thm_1_3"
    if c in (3, 4) and d >= 3:
        return "thm_1_4"
    return None


def _covered(d: int, c: int) -> bool:
    return d >= 1 and 1 <= c <= 1 << (d - 1) and _source(d, c) is not None


def m_formula(d: int, c: int, n: int) -> FormulaClaim:
    """Evaluate the theorem covering ``(d, c)`` at ``n``.

    Raises :class:`DomainError` unless ``d | n`` and ``s = 2^(d-1) - c >= 0``,
    and :class:`NoTheoremError` when no theorem covers ``(d, c)``.
    """
    if d < 1 or c < 1 or n < 1:
        raise DomainError("d, c, n must be positive")
    if n % d:
        raise DomainError(f"d={d} does not divide n={n}")
    if c > 1 << (d - 1):
        raise DomainError(f"c={c} makes s = 2^(d-1) - c negative")
    source = _source(d, c)
    if source is None:
        raise NoTheoremError(f"no theorem applies to d={d}, c={c}")
    s = (1 << (d - 1)) - c
    value = n * ((1 << d) - c) // d
    caveats = []
    if d == 3 and c in (3, 4):
        caveats.append("cross_parametrization")
    conflicts = []
    for d2 in range(1, n + 1):
        if n % d2 or d2 == d:
            continue
        c2 = (1 << (d2 - 1)) - s
        if _covered(d2, c2):
            v2 = n * ((1 << d2) - c2) // d2
            if v2 != value:
                conflicts.append((d2, c2, v2))
    if conflicts:
        caveats.append("conflicting_parametrization")
    return FormulaClaim(d, c, n, s, value, source, tuple(caveats), tuple(conflicts))


def formulas_for(n: int, s: int) -> list[FormulaClaim]:
    """Every theorem instance that speaks about m(n,s)."""
    out = []
    for d in range(1, n + 1):
        c = (1 << (d - 1)) - s
        if n % d == 0 and _covered(d, c):
            out.append(m_formula(d, c, n))
    return out


# -- witness bounds ------------------------------------------------------------

@dataclass(frozen=True)
class UpperBound:
    """``m(n, s) <= bound``, certified by ``witness``."""

    n: int
    s: int
    bound: int
    witness: HereditaryFamily
    witness_bound: int | None = None

    def to_json(self) -> dict:
        out = {"n": self.n, "s": self.s, "bound": self.bound, "witness": family_to_json(self.witness)}
        if self.witness_bound is not None:
            out["witness_bound"] = self.witness_bound
        return out


def upper_bound_from_witness(f: SetFamily, s: int) -> UpperBound:
    """``m(n,s) <= |f| - 1`` for a hereditary ``f`` with min degree ``>= s+1``."""
    if not is_hereditary(f):
        raise CertificateError("certificate rejected: family is not hereditary")
    if f.n and min_degree(f) < s + 1:
        raise CertificateError(
            f"certificate rejected: min degree {min_degree(f)} < s+1 = {s + 1}"
        )
    if not len(f):
        raise CertificateError("certificate rejected: empty family")
    w = f if isinstance(f, HereditaryFamily) else HereditaryFamily(f.n, f.edges)
    return UpperBound(f.n, s, len(f) - 1, w)


def subadditive_combine(r1: SolveResult, r2: SolveResult) -> UpperBound:
    """``m(n1+n2, s) <= m(n1,s) + m(n2,s) + 1`` via the disjoint union of witnesses.

    The union shares ``∅``, so it has ``value1 + value2 + 1`` edges and also
    certifies the sharper ``witness_bound = value1 + value2``.
    """
    if r1.s != r2.s:
        raise DomainError("cannot combine results for different s")
    for r in (r1, r2):
        if r.witness is None:
            raise CertificateError("both results need a witness")
        r.validate()
    union = disjoint_union(r1.witness, r2.witness)
    w = HereditaryFamily(union.n, union.edges)
    cert = upper_bound_from_witness(w, r1.s)
    return UpperBound(w.n, r1.s, r1.value + r2.value + 1, w, cert.bound)
