"""Generators for the block constructions and certificates that recount them."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from .errors import DomainError
from .family import HereditaryFamily, SetFamily, degrees, family_to_json, is_hereditary


@dataclass(frozen=True)
class Claim:
    """What a generator promises: edge count and minimum degree (hence ``s``)."""

    edges: int
    min_degree: int
    exact_degree: bool = False

    @property
    def s(self) -> int:
        return self.min_degree - 1


def _blocks(d: int, n: int) -> list[int]:
    if d < 1 or n < 1:
        raise DomainError("d and n must be positive")
    if n % d:
        raise DomainError(f"d={d} does not divide n={n}")
    return [((1 << d) - 1) << (i * d) for i in range(n // d)]


def _shifted_prefix(count: int, offset: int) -> list[int]:
    # the first ``count`` colex sets, moved onto elements offset..
    return [r << offset for r in range(count)]


def construct_f0(d: int, c: int, n: int) -> HereditaryFamily:
    """``n/d`` disjoint blocks, block ``i`` carrying ``R(2^d - c + 1)`` on elements ``i*d .. i*d+d-1``."""
    if d < 1 or not 1 <= c <= 1 << (d - 1):
        raise DomainError(f"need 1 <= c <= 2^(d-1); got d={d}, c={c}")
    blocks = _blocks(d, n)
    edges = set()
    for i in range(len(blocks)):
        edges.update(_shifted_prefix((1 << d) - c + 1, i * d))
    return HereditaryFamily(n, edges)


def f0_claim(d: int, c: int, n: int) -> Claim:
    return Claim(n * ((1 << d) - c) // d + 1, (1 << (d - 1)) - c + 1)


def construct_powerset_blocks(d: int, n: int, drop_top: int = 0) -> HereditaryFamily:
    """Disjoint ``d``-blocks, each with all its subsets of size at most ``d - drop_top``."""
    if drop_top not in (0, 1, 2) or drop_top > d:
        raise DomainError("drop_top must be 0, 1 or 2 and at most d")
    blocks = _blocks(d, n)
    keep = d - drop_top
    edges = set()
    for i in range(len(blocks)):
        edges.update(r << (i * d) for r in range(1 << d) if r.bit_count() <= keep)
    return HereditaryFamily(n, edges)


def powerset_claim(d: int, n: int, drop_top: int = 0) -> Claim:
    from math import comb

    per_block = sum(comb(d, j) for j in range(1, d - drop_top + 1))
    degree = sum(comb(d - 1, j) for j in range(d - drop_top))
    return Claim(n // d * per_block + 1, degree, exact_degree=True)


def construct_5_1(d: int, k: int, seed: int | None = None) -> HereditaryFamily:
    """The non-local family on ``n = 2dk`` vertices.

    Blocks ``U_i`` are consecutive ``d``-sets. Edges: every subset of a block
    of size at most ``d-2``; each block minus its distinguished vertex ``x_i``;
    and the pairs ``{x_i, x_(i+1)}`` joining blocks (0,1), (2,3), ... ``x_i`` is
    the first vertex of its block unless ``seed`` is given, in which case it is
    drawn uniformly with ``random.Random(seed)``.
    """
    if d < 5 or k < 1:
        raise DomainError("need d >= 5 and k >= 1")
    n = 2 * d * k
    if n > 64:
        raise DomainError(f"n = 2dk = {n} exceeds the 64-element capacity")
    rng = random.Random(seed) if seed is not None else None
    xs = [i * d + (rng.randrange(d) if rng else 0) for i in range(2 * k)]
    edges = set()
    for i in range(2 * k):
        edges.update(r << (i * d) for r in range(1 << d) if r.bit_count() <= d - 2)
        edges.add((((1 << d) - 1) << (i * d)) & ~(1 << xs[i]))
    for i in range(0, 2 * k, 2):
        edges.add((1 << xs[i]) | (1 << xs[i + 1]))
    return HereditaryFamily(n, edges)


def claim_5_1(d: int, k: int) -> Claim:
    # ((2^d - d - 1/2)/d) n + 1 with n = 2dk, which is (2^d - d) 2k - k + 1
    return Claim(((1 << d) - d) * 2 * k - k + 1, (1 << (d - 1)) - d + 1, exact_degree=True)


@dataclass
class ConstructionReport:
    """Counts recomputed from the raw family and compared with the claims."""

    family: SetFamily
    s: int
    edge_count: int
    degree_histogram: dict[int, int]
    min_degree: int
    hereditary: bool
    claim: Claim | None
    bound: int | None
    passed: bool
    reasons: list[str] = field(default_factory=list)

    def to_json(self, include_family: bool = False) -> dict:
        out = {
            "n": self.family.n,
            "s": self.s,
            "edge_count": self.edge_count,
            "degree_histogram": {str(k): v for k, v in sorted(self.degree_histogram.items())},
            "min_degree": self.min_degree,
            "hereditary": self.hereditary,
            "claimed_edges": None if self.claim is None else self.claim.edges,
            "claimed_min_degree": None if self.claim is None else self.claim.min_degree,
            "implied_bound": self.bound,
            "pass": self.passed,
            "reasons": list(self.reasons),
        }
        if include_family:
            out["family"] = family_to_json(self.family)
        return out


def certify(family: SetFamily, s: int, claim: Claim | None = None) -> ConstructionReport:
    """Recount ``family`` and decide whether it certifies ``m(n, s) <= |family| - 1``."""
    degs = degrees(family)
    hist = dict(sorted(Counter(degs).items()))
    low = min(degs) if degs else 0
    hered = is_hereditary(family)
    reasons = []
    if not hered:
        reasons.append("family is not hereditary")
    if not len(family):
        reasons.append("family is empty")
    if family.n and low < s + 1:
        reasons.append(f"min degree {low} < s+1 = {s + 1}")
    if claim is not None:
        if len(family) != claim.edges:
            reasons.append(f"edge count {len(family)} != claimed {claim.edges}")
        if low != claim.min_degree:
            reasons.append(f"min degree {low} != claimed {claim.min_degree}")
        if claim.exact_degree and len(hist) > 1:
            reasons.append("family is not regular")
    passed = not reasons
    return ConstructionReport(
        family=family,
        s=s,
        edge_count=len(family),
        degree_histogram=hist,
        min_degree=low,
        hereditary=hered,
        claim=claim,
        bound=len(family) - 1 if passed else None,
        passed=passed,
        reasons=reasons,
    )
