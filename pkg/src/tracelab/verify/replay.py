"""Replay of the two non-uniform vertex-weight schemes on a concrete family.

Both schemes start from the uniform weight (each nonempty edge's unit split
evenly over its vertices), pick a maximum set ``L`` of light vertices with
pairwise disjoint neighbourhoods, and then move part of some crossing edges'
unit from cluster vertices to the vertices outside every cluster.

``main``     light means ``|V_v| = d``; a 2-edge ``{x, w}`` with ``x`` in an
             L2 cluster ``V_v`` and ``w`` outside it takes ``beta`` from ``x``;
             an outside vertex ``a`` gains ``beta`` for each 2-edge into the
             cluster of its anchor ``v(a)``. ``beta = 1/2 - (c-1)/(d-c)``.
``small_c``  light means the link is isomorphic to ``R(2^(d-1) - c + 1)``; on
             every 3-edge meeting both an L2 cluster and an outside vertex,
             cluster vertices give up ``1/9`` and outside vertices gain ``1/18``.

Weights are computed twice: from the closed formulas and by summing per-edge
shares. The two must agree, and every edge's shares must sum to at most 1.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from ..errors import ResourceLimitError
from ..family import (
    SetFamily,
    colex_initial,
    degrees,
    elements_of,
    is_hereditary,
    link,
    neighborhood,
    support,
)
from ..iso import iso_up_to_isolated
from ..weights import fmt_rational
from .report import CheckReport, Counterexample, min_opt

REPLAY_LIMIT = 24
SCHEMES = ("main", "small_c")


@dataclass
class VertexClassification:
    """The partition used by a weight scheme.

    ``vertex_class[x]`` is one of ``heavy``, ``L1``, ``L2``, ``outside`` (the
    set written L-bar) or ``isolated``.
    """

    scheme: str
    light: list[int]
    L: list[int]
    clusters: dict[int, int]
    L1: list[int]
    L2: list[int]
    heavy: list[int]
    outside: list[int]
    anchors: dict[int, int | None]
    vertex_class: list[str]
    S: list[int] = field(default_factory=list)
    s_incidence: dict[int, int] = field(default_factory=dict)
    mixed_light: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "light": self.light,
            "L": self.L,
            "clusters": {str(v): elements_of(m) for v, m in sorted(self.clusters.items())},
            "L1": self.L1,
            "L2": self.L2,
            "heavy": self.heavy,
            "outside": self.outside,
            "anchors": {str(a): v for a, v in sorted(self.anchors.items())},
            "vertex_class": self.vertex_class,
            "S": [elements_of(h) for h in self.S],
            "s_incidence": {str(x): k for x, k in sorted(self.s_incidence.items())},
            "mixed_light": self.mixed_light,
        }


def _uniform(family: SetFamily) -> list[Fraction]:
    out = [Fraction(0)] * family.n
    for x in range(family.n):
        out[x] = sum((Fraction(1, h.bit_count() + 1) for h in link(family, x).edges), Fraction(0))
    return out


def _light_main(family: SetFamily, d: int, nbhd: list[int]) -> list[bool]:
    return [m.bit_count() == d for m in nbhd]


def _light_small(family: SetFamily, d: int, c: int) -> list[bool]:
    size = (1 << (d - 1)) - c + 1
    if size < 1:
        return [False] * family.n
    ref = colex_initial(size)
    out = []
    for x in range(family.n):
        lk = link(family, x)
        if len(lk) != size or sorted(e.bit_count() for e in lk.edges) != sorted(
            e.bit_count() for e in ref.edges
        ):
            out.append(False)
            continue
        out.append(iso_up_to_isolated(lk, ref))
    return out


def max_disjoint_light(light: list[int], nbhd: list[int]) -> list[int]:
    """A maximum set of light vertices with pairwise disjoint neighbourhoods.

    Exact: memoised branching over the conflict graph. Among maximum sets the
    lexicographically least sorted one is returned.
    """
    k = len(light)
    conflict = [0] * k
    for i in range(k):
        for j in range(k):
            if nbhd[light[i]] & nbhd[light[j]]:
                conflict[i] |= 1 << j

    @lru_cache(maxsize=None)
    def best(avail: int) -> int:
        if not avail:
            return 0
        i = (avail & -avail).bit_length() - 1
        rest = avail & ~(1 << i)
        return max(best(rest), 1 + best(rest & ~conflict[i]))

    chosen = []
    avail = (1 << k) - 1
    need = best(avail)
    for i in range(k):
        if need == 0:
            break
        if avail >> i & 1 and 1 + best(avail & ~conflict[i] & ~((1 << (i + 1)) - 1)) == need:
            chosen.append(light[i])
            avail &= ~conflict[i] & ~((1 << (i + 1)) - 1)
            need -= 1
        else:
            avail &= ~(1 << i)
    return chosen


def classify(family: SetFamily, d: int, c: int, scheme: str) -> VertexClassification:
    """Partition the vertices as the chosen scheme prescribes."""
    n = family.n
    nbhd = [neighborhood(family, x) for x in range(n)]
    main_light = _light_main(family, d, nbhd)
    try:
        small_light = _light_small(family, d, c)
    except ResourceLimitError:
        if scheme == "small_c":
            raise
        small_light = None
    is_light = main_light if scheme == "main" else small_light
    light = [x for x in range(n) if is_light[x]]
    chosen = max_disjoint_light(light, nbhd)
    clusters = {v: nbhd[v] for v in chosen}
    covered = 0
    for m in clusters.values():
        covered |= m
    L1, L2 = [], []
    for v, vv in clusters.items():
        crossing = any(e & vv and e & ~vv for e in family.edges)
        (L2 if crossing else L1).append(v)
    heavy, outside = [], []
    alive = support(family)
    for u in range(n):
        if covered >> u & 1 or not alive >> u & 1:
            continue
        if scheme == "main":
            (heavy if nbhd[u].bit_count() > d else outside).append(u)
        else:
            (outside if small_light[u] else heavy).append(u)
    anchors: dict[int, int | None] = {}
    for a in outside:
        anchors[a] = next((v for v in sorted(L2) if nbhd[a] & clusters[v]), None)
    vclass = ["isolated"] * n
    for u in heavy:
        vclass[u] = "heavy"
    for a in outside:
        vclass[a] = "outside"
    for v in L1:
        for x in elements_of(clusters[v]):
            vclass[x] = "L1"
    for v in L2:
        for x in elements_of(clusters[v]):
            vclass[x] = "L2"
    S = []
    inc: dict[int, int] = {}
    if scheme == "small_c":
        l2mask = 0
        for v in L2:
            l2mask |= clusters[v]
        outmask = sum(1 << a for a in outside)
        S = [e for e in family.edges if e.bit_count() == 3 and e & l2mask and e & outmask]
        for e in S:
            for x in elements_of(e):
                inc[x] = inc.get(x, 0) + 1
    # vertices light under one definition but not the other
    mixed = [] if small_light is None else [x for x in range(n) if main_light[x] != small_light[x]]
    return VertexClassification(
        scheme, light, sorted(chosen), clusters, sorted(L1), sorted(L2), heavy, outside,
        anchors, vclass, S, inc, mixed,
    )


def _cluster_of(cls: VertexClassification) -> dict[int, int]:
    owner = {}
    for v, vv in cls.clusters.items():
        for x in elements_of(vv):
            owner[x] = v
    return owner


def _weights_by_formula(family, d, c, cls, uniform, nbhd) -> list[Fraction]:
    w = list(uniform)
    if cls.scheme == "main":
        beta = Fraction(1, 2) - Fraction(c - 1, d - c)
        for v in cls.L2:
            for x in elements_of(cls.clusters[v]):
                w[x] -= (nbhd[x] & ~cls.clusters[v]).bit_count() * beta
        for a, v in cls.anchors.items():
            if v is not None:
                w[a] += (nbhd[a] & cls.clusters[v]).bit_count() * beta
    else:
        for x, k in cls.s_incidence.items():
            if cls.vertex_class[x] == "L2":
                w[x] -= Fraction(k, 9)
            elif cls.vertex_class[x] == "outside":
                w[x] += Fraction(k, 18)
    return w


def _edge_shares(family, d, c, cls):
    """Yield ``(edge, {vertex: share})`` for every nonempty edge."""
    owner = _cluster_of(cls)
    in_l2 = set(cls.L2)
    s_set = set(cls.S)
    beta = Fraction(1, 2) - Fraction(c - 1, d - c) if cls.scheme == "main" else None
    for e in family.edges:
        if not e:
            continue
        verts = elements_of(e)
        share = {x: Fraction(1, len(verts)) for x in verts}
        if cls.scheme == "main" and len(verts) == 2:
            for x, w in (verts, verts[::-1]):
                v = owner.get(x)
                if v in in_l2 and not cls.clusters[v] >> w & 1:
                    share[x] -= beta
                if cls.vertex_class[x] == "outside":
                    anchor = cls.anchors.get(x)
                    if anchor is not None and cls.clusters[anchor] >> w & 1:
                        share[x] += beta
        elif cls.scheme == "small_c" and e in s_set:
            for x in verts:
                if cls.vertex_class[x] == "L2":
                    share[x] -= Fraction(1, 9)
                elif cls.vertex_class[x] == "outside":
                    share[x] += Fraction(1, 18)
        yield e, share


def _hypotheses(family: SetFamily, d: int, c: int, scheme: str) -> list[str]:
    problems = []
    if not is_hereditary(family):
        problems.append("family is not hereditary")
    if scheme == "main" and not (c >= 1 and d >= 4 * c):
        problems.append(f"scheme main needs d >= 4c (d={d}, c={c})")
    if scheme == "small_c" and not (c in (3, 4) and d >= 5):
        problems.append(f"scheme small_c needs c in {{3,4}} and d >= 5 (d={d}, c={c})")
    need = (1 << (d - 1)) - c + 1
    low = min(degrees(family), default=0)
    if low < need:
        problems.append(f"min degree {low} < 2^(d-1) - c + 1 = {need}")
    return problems


def replay_weights(
    family: SetFamily,
    d: int,
    c: int,
    scheme: str = "main",
    enforce_hypotheses: bool = True,
) -> CheckReport:
    """Classify, weigh and check one family against a scheme's inequalities.

    Checked: per-edge shares sum to at most 1 and reproduce the formula
    weights; ``sum w <= 1 + |F|`` (and the sharper ``<= |F| - 1``); every heavy
    vertex and every outside vertex weighs at least ``tau = (2^d - c)/d``;
    every cluster averages at least ``tau``; ``|F| >= n tau + 1``.

    A family outside the scheme's hypotheses is ``rejected``. With
    ``enforce_hypotheses=False`` the replay still runs for inspection, but the
    status stays ``rejected``.
    """
    scheme = scheme.replace("-", "_")
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    start = time.perf_counter()
    report = CheckReport("replay", {"d": d, "c": c, "scheme": scheme, "n": family.n})
    if support(family).bit_count() > REPLAY_LIMIT or family.n > REPLAY_LIMIT:
        raise ResourceLimitError(f"replay is limited to {REPLAY_LIMIT} vertices")
    problems = _hypotheses(family, d, c, scheme)
    if problems and enforce_hypotheses:
        report.status = "rejected"
        report.reason = "hypothesis not met: " + "; ".join(problems)
        report.runtime = time.perf_counter() - start
        return report
    if scheme == "main" and d <= c:
        raise ValueError("scheme main needs d > c")

    tau = Fraction((1 << d) - c, d)
    cls = classify(family, d, c, scheme)
    report.classification = cls
    nbhd = [neighborhood(family, x) for x in range(family.n)]
    uniform = _uniform(family)
    formula = _weights_by_formula(family, d, c, cls, uniform, nbhd)
    by_share = [Fraction(0)] * family.n
    failures: list[Counterexample] = []
    worst_edge = Fraction(0)
    for e, share in _edge_shares(family, d, c, cls):
        total = sum(share.values(), Fraction(0))
        worst_edge = max(worst_edge, total)
        for x, s in share.items():
            by_share[x] += s
        report.examined += 1
        if total > 1:
            failures.append(Counterexample(family, f"shares of edge {elements_of(e)} sum to <= 1", total, 1))
        else:
            report.passed += 1

    def check(name: str, lhs, rhs, **params) -> None:
        report.examined += 1
        slack = lhs - rhs
        report.min_slack = min_opt(report.min_slack, slack)
        if slack >= 0:
            report.passed += 1
        else:
            failures.append(Counterexample(family, name, lhs, rhs, params))

    report.examined += 1
    if formula == by_share:
        report.passed += 1
    else:
        bad = [x for x in range(family.n) if formula[x] != by_share[x]]
        failures.append(Counterexample(family, "formula weight == share weight", formula[bad[0]], by_share[bad[0]], {"vertex": bad[0]}))

    for a, v in cls.anchors.items():
        report.examined += 1
        if v is None:
            failures.append(Counterexample(family, "every outside vertex has an anchor in L2", None, None, {"vertex": a}))
        else:
            report.passed += 1

    averages = {}
    for u in cls.heavy:
        check("heavy vertex weight >= tau", formula[u], tau, vertex=u)
    for kind, group in (("L1", cls.L1), ("L2", cls.L2)):
        for v in group:
            members = elements_of(cls.clusters[v])
            avg = sum((formula[x] for x in members), Fraction(0)) / len(members)
            averages[f"{kind}:{v}"] = fmt_rational(avg)
            check(f"{kind} cluster average >= tau", avg, tau, cluster=v)
    for a in cls.outside:
        check("outside vertex weight >= tau", formula[a], tau, vertex=a)

    total = sum(formula, Fraction(0))
    edges = len(family)
    report.examined += 2
    if total <= 1 + edges:
        report.passed += 1
    else:
        failures.append(Counterexample(family, "sum of weights <= 1 + |F|", total, 1 + edges))
    if total <= edges - 1:
        report.passed += 1
    else:
        failures.append(Counterexample(family, "sum of weights <= |F| - 1", total, edges - 1))
    n_alive = support(family).bit_count()
    check("|F| >= n tau + 1", Fraction(edges), n_alive * tau + 1)

    report.details = {
        "tau": fmt_rational(tau),
        "edges": edges,
        "total_weight": fmt_rational(total),
        "max_edge_share_sum": fmt_rational(worst_edge),
        "cluster_averages": averages,
        "weights": [fmt_rational(w) for w in formula],
        "classification": cls.to_json(),
    }
    if failures:
        report.fail(failures[0])
        report.details["violations"] = [f.inequality for f in failures]
    if problems:
        report.status = "rejected"
        report.reason = "hypothesis not met: " + "; ".join(problems)
    report.runtime = time.perf_counter() - start
    return report
