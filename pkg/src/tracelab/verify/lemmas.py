"""Exhaustive checkers for the weight inequality, the two local lemmas, the
hereditary reduction and the numeric bound on W.

Each checker folds a reducer over the down-set stream of ``enumeration``.
Partial results hold integer counters, integer slacks scaled by a common
denominator, and the least violating family as a dense bitset, so combining
them is associative and independent of how the stream was split.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from ..enumeration import NO_FILTER, Reducer, fold_downsets, level_masks, popcount, vertex_masks
from ..errors import DomainError, ResourceLimitError
from ..family import HereditaryFamily, SetFamily, colex_initial, degrees
from ..iso import MAX_ISO_VERTICES, iso_up_to_isolated
from ..solver import ArrowQuery, arrows_decision
from ..weights import W, WeightFn, bound_2_1_holds, default_battery, family_weight, katona_bound
from .report import CheckReport, Counterexample, min_opt

KATONA_LIMIT = 5
LEMMA31_LIMIT = 6
LEMMA32_LIMIT = 6
LEMMA21_LIMIT = 4


def _levels(block) -> tuple[np.ndarray, np.ndarray]:
    """Dense bitsets of a block and their edge counts per cardinality."""
    fams = np.asarray(block.families(), dtype=np.uint64)
    lv = [popcount(fams & np.uint64(m)) for m in level_masks(block.n)]
    return fams, np.stack(lv, axis=1)


def _non_isolated(n: int, fams: np.ndarray) -> np.ndarray:
    out = np.zeros(len(fams), dtype=np.int64)
    for m in vertex_masks(n):
        out += (fams & np.uint64(m)) != 0
    return out


def _least(bits: np.ndarray, mask: np.ndarray) -> int | None:
    hit = bits[mask]
    return int(hit.min()) if len(hit) else None


def _min_int(arr: np.ndarray) -> int | None:
    return int(arr.min()) if len(arr) else None


# -- Katona ---------------------------------------------------------------------

class _KatonaReducer(Reducer):
    def __init__(self, n: int, fns: list[WeightFn]) -> None:
        self.n = n
        self.scales = []
        self.values = []
        self.bounds = []
        for f in fns:
            scale = 1
            for k in range(n + 1):
                scale = math.lcm(scale, f(k).denominator)
            self.scales.append(scale)
            self.values.append(np.array([int(f(k) * scale) for k in range(n + 1)], dtype=np.int64))
            self.bounds.append(
                np.array([int(katona_bound(m, f) * scale) for m in range((1 << n) + 1)], dtype=np.int64)
            )
        # (families seen, violations, per-function min slack, least (bits, fn index))
        self.identity = (0, 0, (None,) * len(fns), None)

    def block(self, block):
        fams, levels = _levels(block)
        edges = levels.sum(axis=1)
        slacks = []
        bad = 0
        worst = None
        for i, (vals, bound) in enumerate(zip(self.values, self.bounds)):
            slack = levels @ vals - bound[edges]
            slacks.append(_min_int(slack))
            viol = slack < 0
            bad += int(viol.sum())
            least = _least(fams, viol)
            if least is not None:
                worst = min_opt(worst, (least, i))
        return (len(fams), bad, tuple(slacks), worst)

    def combine(self, x, y):
        return (
            x[0] + y[0],
            x[1] + y[1],
            tuple(min_opt(a, b) for a, b in zip(x[2], y[2])),
            min_opt(x[3], y[3]),
        )


def check_katona(
    n_max: int = KATONA_LIMIT, fns: list[WeightFn] | None = None, jobs: int | None = None
) -> CheckReport:
    """``sum f(|F|) >= sum over R(|F|)`` for every down-set on ``n <= n_max`` vertices and every ``f``.

    One instance is one (family, function) pair.
    """
    fns = default_battery() if fns is None else list(fns)
    if not fns:
        raise DomainError("the weight battery is empty")
    if not 0 <= n_max <= KATONA_LIMIT:
        raise ResourceLimitError(f"check_katona is limited to n_max <= {KATONA_LIMIT}")
    start = time.perf_counter()
    report = CheckReport("katona", {"n_max": n_max, "fns": [f.name for f in fns]})
    per_fn: list[Fraction | None] = [None] * len(fns)
    bad_total = 0
    for n in range(n_max + 1):
        red = _KatonaReducer(n, fns)
        seen, bad, slacks, worst = fold_downsets(n, NO_FILTER, red, jobs).value
        report.examined += seen * len(fns)
        bad_total += bad
        for i, s in enumerate(slacks):
            if s is not None:
                per_fn[i] = min_opt(per_fn[i], Fraction(s, red.scales[i]))
        if worst is not None and report.counterexample is None:
            bits, i = worst
            fam = HereditaryFamily.from_dense(n, bits)
            report.fail(
                Counterexample(
                    fam,
                    f"sum f(|F|) >= katona_bound(|F|, f) for f = {fns[i].name}",
                    family_weight(fam, fns[i]),
                    katona_bound(len(fam), fns[i]),
                    {"fn": fns[i].name},
                )
            )
    report.passed = report.examined - bad_total
    known = [s for s in per_fn if s is not None]
    report.min_slack = min(known) if known else None
    report.details = {
        "min_slack_by_fn": {f.name: None if s is None else f"{s.numerator}/{s.denominator}" for f, s in zip(fns, per_fn)}
    }
    report.runtime = time.perf_counter() - start
    return report


# -- local weight lemma ----------------------------------------------------------

class _Lemma31Reducer(Reducer):
    def __init__(self, n: int, d: int, c: int) -> None:
        self.n, self.d, self.c = n, d, c
        self.m = (1 << d) - c
        self.scale = math.lcm(*range(1, max(n + 1, 6) + 1), d)
        self.inv = np.array([self.scale // (k + 1) for k in range(n + 1)], dtype=np.int64)
        base = W(self.m)
        self.t1 = int(base * self.scale)
        self.t2 = int((base + Fraction(1, 6)) * self.scale)
        self.t3 = int((base + min(Fraction(1, 6), Fraction(1, d))) * self.scale)
        self.ref = colex_initial(self.m)
        # counts: qualifying, clause-ii instances, clause-iii instances, iso checks, skipped, violations
        self.identity = ((0, 0, 0, 0, 0, 0), (None, None, None), None)

    def block(self, block):
        fams, levels = _levels(block)
        q = levels.sum(axis=1) >= self.m
        fams, levels = fams[q], levels[q]
        weight = levels @ self.inv
        viol = weight < self.t1
        s1 = _min_int(weight - self.t1)
        big = _non_isolated(self.n, fams) >= self.d + 1
        v2 = big & (weight < self.t2)
        s2 = _min_int(weight[big] - self.t2)
        worst = min_opt(
            None if not viol.any() else (_least(fams, viol), 1),
            None if not v2.any() else (_least(fams, v2), 2),
        )
        bad = viol | v2
        n3 = iso = skipped = 0
        s3 = None
        if self.c in (2, 3):
            n3 = len(fams)
            low = weight < self.t3
            ok3 = ~low
            for j in np.flatnonzero(low):
                fam = SetFamily.from_dense(self.n, int(fams[j]))
                if _non_isolated(self.n, fams[j : j + 1])[0] > MAX_ISO_VERTICES:
                    skipped += 1
                    continue
                iso += 1
                if not iso_up_to_isolated(fam, self.ref):
                    ok3[j] = True
                    bad[j] = True
                    worst = min_opt(worst, (int(fams[j]), 3))
            s3 = _min_int(weight[ok3] - self.t3)
        counts = (len(fams), int(big.sum()), n3, iso, skipped, int(bad.sum()))
        return counts, (s1, s2, s3), worst

    def combine(self, x, y):
        return (
            tuple(a + b for a, b in zip(x[0], y[0])),
            tuple(min_opt(a, b) for a, b in zip(x[1], y[1])),
            min_opt(x[2], y[2]),
        )


def _lemma31_weight(fam: SetFamily) -> Fraction:
    return sum((Fraction(1, e.bit_count() + 1) for e in fam.edges), Fraction(0))


def check_lemma_3_1(d: int, c: int, n_max: int = 5, jobs: int | None = None) -> CheckReport:
    """The three clauses of the local weight lemma for ``|H| >= 2^d - c`` on ``n <= n_max`` vertices.

    (i) weight ``>= W(2^d-c)``; (ii) with at least ``d+1`` non-isolated vertices,
    ``+1/6``; (iii) for ``c in {2,3}`` and ``H`` not isomorphic to ``R(2^d-c)``,
    ``+min(1/6, 1/d)``. Weight means ``sum 1/(|H|+1)``. The isomorphism test only
    runs for families below the clause (iii) threshold.
    """
    if d < 4 or c > 1 << d:
        raise DomainError("need d >= 4 and c <= 2^d")
    if not 0 <= n_max <= LEMMA31_LIMIT:
        raise ResourceLimitError(f"check_lemma_3_1 is limited to n_max <= {LEMMA31_LIMIT}")
    start = time.perf_counter()
    m = (1 << d) - c
    report = CheckReport("lemma31", {"d": d, "c": c, "n_max": n_max, "m": m})
    if m > 1 << n_max:
        report.status = "skipped"
        report.reason = f"no family on {n_max} vertices has {m} edges"
        report.runtime = time.perf_counter() - start
        return report
    totals = [0] * 6
    slack: list[Fraction | None] = [None, None, None]
    for n in range(n_max + 1):
        if m > 1 << n:
            continue
        red = _Lemma31Reducer(n, d, c)
        counts, slacks, worst = fold_downsets(n, NO_FILTER, red, jobs).value
        totals = [a + b for a, b in zip(totals, counts)]
        for i, s in enumerate(slacks):
            if s is not None:
                slack[i] = min_opt(slack[i], Fraction(s, red.scale))
        if worst is not None and report.counterexample is None:
            bits, clause = worst
            fam = HereditaryFamily.from_dense(n, bits)
            extra = {1: Fraction(0), 2: Fraction(1, 6), 3: min(Fraction(1, 6), Fraction(1, d))}[clause]
            report.fail(
                Counterexample(
                    fam,
                    f"clause {'i' * clause}: sum 1/(|H|+1) >= W({m}) + {extra}",
                    _lemma31_weight(fam),
                    W(m) + extra,
                    {"clause": clause},
                )
            )
    qualifying, clause2, clause3, iso, skipped, bad = totals
    report.examined = qualifying
    report.skipped = skipped
    report.passed = qualifying - bad - skipped
    known = [s for s in slack if s is not None]
    report.min_slack = min(known) if known else None
    report.details = {
        "clause_i_instances": qualifying,
        "clause_ii_instances": clause2,
        "clause_iii_instances": clause3,
        "iso_checks": iso,
        "min_slack_by_clause": [None if s is None else f"{s.numerator}/{s.denominator}" for s in slack],
    }
    report.runtime = time.perf_counter() - start
    return report


# -- local degree lemma ----------------------------------------------------------

class _Lemma32Reducer(Reducer):
    def __init__(self, d: int, c: int) -> None:
        self.d, self.c = d, c
        self.identity = ((0, 0, 0, 0), (None, None), None)

    def block(self, block):
        d, c = self.d, self.c
        fams = np.asarray(block.families(), dtype=np.uint64)
        edges = block.edge_counts()
        degs = block.degrees()
        hyp1 = edges <= (1 << d) - c - 1
        low = (degs <= (1 << (d - 1)) - c - 1).sum(axis=1)
        slack1 = low - (d - c)
        v1 = hyp1 & (slack1 < 0)
        if d >= c + 1:
            hyp2 = degs.min(axis=1) >= (1 << (d - 1)) - c
        else:
            hyp2 = np.zeros(len(fams), dtype=bool)
        slack2 = edges - ((1 << d) - c)
        v2 = hyp2 & (slack2 < 0)
        worst = min_opt(
            None if not v1.any() else (_least(fams, v1), 1),
            None if not v2.any() else (_least(fams, v2), 2),
        )
        counts = (len(fams), int(hyp1.sum()), int(hyp2.sum()), int((v1 | v2).sum()))
        return counts, (_min_int(slack1[hyp1]), _min_int(slack2[hyp2])), worst

    def combine(self, x, y):
        return (
            tuple(a + b for a, b in zip(x[0], y[0])),
            tuple(min_opt(a, b) for a, b in zip(x[1], y[1])),
            min_opt(x[2], y[2]),
        )


def check_lemma_3_2(d: int, c: int | None = None, jobs: int | None = None) -> CheckReport:
    """Both clauses of the local degree lemma over every down-set on a ``d``-set.

    (1) ``|H| <= 2^d - c - 1`` forces at least ``d - c`` vertices of degree
    ``<= 2^(d-1) - c - 1``; (2) ``d >= c+1`` and min degree ``>= 2^(d-1) - c``
    force ``|H| >= 2^d - c``. ``c=None`` sweeps ``c = 1 .. 2^d``.
    """
    if not 1 <= d <= LEMMA32_LIMIT:
        raise ResourceLimitError(f"check_lemma_3_2 needs 1 <= d <= {LEMMA32_LIMIT}")
    cs = range(1, (1 << d) + 1) if c is None else [c]
    if c is not None and c < 1:
        raise DomainError("c must be positive")
    start = time.perf_counter()
    report = CheckReport("lemma32", {"d": d, "c": c if c is not None else "all"})
    hyp1 = hyp2 = bad = 0
    slack: list[int | None] = [None, None]
    for cc in cs:
        counts, slacks, worst = fold_downsets(d, NO_FILTER, _Lemma32Reducer(d, cc), jobs).value
        report.examined += counts[0]
        hyp1 += counts[1]
        hyp2 += counts[2]
        bad += counts[3]
        slack = [min_opt(a, b) for a, b in zip(slack, slacks)]
        if worst is not None and report.counterexample is None:
            bits, clause = worst
            fam = HereditaryFamily.from_dense(d, bits)
            if clause == 1:
                lhs = sum(1 for x in degrees(fam) if x <= (1 << (d - 1)) - cc - 1)
                ineq, rhs = f"#vertices of degree <= {(1 << (d - 1)) - cc - 1} >= d - c", d - cc
            else:
                lhs, ineq, rhs = len(fam), "|H| >= 2^d - c", (1 << d) - cc
            report.fail(Counterexample(fam, ineq, lhs, rhs, {"c": cc, "clause": clause}))
    report.passed = report.examined - bad
    known = [s for s in slack if s is not None]
    report.min_slack = Fraction(min(known)) if known else None
    report.details = {
        "clause_1_instances": hyp1,
        "clause_2_instances": hyp2,
        "min_slack_by_clause": slack,
    }
    report.runtime = time.perf_counter() - start
    return report


# -- hereditary reduction --------------------------------------------------------

def check_lemma_2_1(n_max: int = LEMMA21_LIMIT) -> CheckReport:
    """Arrowing restricted to hereditary families agrees with arrowing over all
    families, for every ``n <= n_max`` and every ``(m, a, b)`` with ``a <= n`` and
    ``m, b <= 2^n``."""
    if not 0 <= n_max <= LEMMA21_LIMIT:
        raise ResourceLimitError(f"check_lemma_2_1 is limited to n_max <= {LEMMA21_LIMIT}")
    start = time.perf_counter()
    report = CheckReport("lemma21", {"n_max": n_max})
    holds = 0
    for n in range(n_max + 1):
        top = 1 << n
        for a in range(n + 1):
            for m in range(top + 1):
                for b in range(top + 1):
                    report.examined += 1
                    h = arrows_decision(ArrowQuery(n, m, a, b, hereditary_only=True))
                    g = arrows_decision(ArrowQuery(n, m, a, b, hereditary_only=False))
                    if h.holds == g.holds:
                        report.passed += 1
                        holds += h.holds
                    elif report.counterexample is None:
                        fam = h.counterexample or g.counterexample
                        report.fail(
                            Counterexample(
                                fam,
                                "hereditary-only arrowing == general arrowing",
                                h.holds,
                                g.holds,
                                {"n": n, "m": m, "a": a, "b": b},
                            )
                        )
    report.details = {"triples_where_arrowing_holds": holds}
    report.runtime = time.perf_counter() - start
    return report


# -- numeric bound on W ----------------------------------------------------------

def check_bound_2_1(d_min: int = 4, d_max: int = 12, include_c1: bool = True, tol: float = 1e-9) -> CheckReport:
    """Sweep ``W(2^(d-1) - c) >= (2^d - 1)/d - c/(d - log2 c)`` over
    ``d_min <= d <= d_max`` and ``1 <= c <= 2^(d-2)``; ``c = 1`` is flagged."""
    if d_min < 2 or d_max < d_min:
        raise DomainError("need 2 <= d_min <= d_max")
    if d_max > 21:
        raise ResourceLimitError("W is limited to prefixes of length 2^20")
    start = time.perf_counter()
    report = CheckReport("bound21", {"d_min": d_min, "d_max": d_max, "include_c1": include_c1})
    flagged = 0
    for d in range(d_min, d_max + 1):
        for c in range(1 if include_c1 else 2, (1 << (d - 2)) + 1):
            res = bound_2_1_holds(d, c, tol)
            report.examined += 1
            flagged += res.outside_estimate_range
            report.min_slack = min_opt(report.min_slack, res.slack)
            if res.holds:
                report.passed += 1
            elif report.counterexample is None:
                report.fail(
                    Counterexample(
                        colex_initial((1 << (d - 1)) - c),
                        "W(2^(d-1) - c) >= (2^d - 1)/d - c/(d - log2 c)",
                        res.lhs,
                        res.rhs,
                        {"d": d, "c": c},
                    )
                )
    report.details = {"flagged_c1": flagged}
    report.runtime = time.perf_counter() - start
    return report
