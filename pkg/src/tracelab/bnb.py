"""Branch and bound for the smallest hereditary family with a given minimum degree.

Sets are decided in decreasing colex rank, so every superset of a set is
decided before the set itself. Including a set adds its whole down-closure and
makes it a maximal edge for good; excluding it is final as well.

Pruning:
  * degree deficit: a vertex short of ``delta`` by ``k`` needs ``k`` more
    edges, and ``m`` more edges of size at most ``kmax`` cover at most
    ``m * kmax`` vertex incidences;
  * availability: the undecided sets through a vertex must cover its deficit;
  * dominance: a set containing no deficient vertex is never included
    (dropping it again keeps every degree at least ``delta``);
  * incumbent cut on the edge count;
  * symmetry, first level only: the largest edge has size ``k`` and is
    ``{0, ..., k-1}`` (all ``k``-sets form one orbit).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import comb

from .enumeration import subset_masks, vertex_masks
from .errors import ResourceLimitError

BNB_LIMIT = 10


@dataclass
class BnbResult:
    size: int | None
    bits: int | None
    optimal: bool
    nodes: int


class _Timeout(Exception):
    pass


def min_family(
    n: int,
    delta: int,
    deadline: float | None = None,
    incumbent: int | None = None,
) -> BnbResult:
    """Fewest edges of a hereditary family on ``[n]`` with every degree ``>= delta``.

    ``incumbent`` is an optional feasible dense bitset used as the starting
    upper bound. Returns ``size=None`` when no family qualifies.
    """
    if n > BNB_LIMIT:
        raise ResourceLimitError(f"branch and bound limited to n <= {BNB_LIMIT}")
    if n > 8 and deadline is None:
        raise ResourceLimitError("n > 8 requires a timeout")
    if n == 0 or delta > 1 << (n - 1):
        # n = 0 has no vertex, so only the exhaustive backend's convention applies
        return BnbResult(None, None, True, 0)
    sub = subset_masks(n)
    vm = vertex_masks(n)
    by_size = [0] * (n + 1)
    for r in range(1 << n):
        by_size[r.bit_count()] |= 1 << r
    at_most = [0] * (n + 1)
    acc = 0
    for k in range(n + 1):
        acc |= by_size[k]
        at_most[k] = acc

    best_size = (1 << n) + 1
    best_bits = None
    if incumbent is not None:
        best_size, best_bits = incumbent.bit_count(), incumbent
    elif delta <= 1 << (n - 1):
        best_size, best_bits = 1 << n, (1 << (1 << n)) - 1
    nodes = 0

    def search(fam: int, pool: int, kmax: int) -> None:
        nonlocal best_size, best_bits, nodes
        nodes += 1
        if deadline is not None and nodes & 1023 == 0 and time.time() > deadline:
            raise _Timeout
        size = fam.bit_count()
        deficit_mask = 0
        max_def = 0
        total_def = 0
        for v in range(n):
            short = delta - (fam & vm[v]).bit_count()
            if short > 0:
                if (pool & vm[v]).bit_count() < short:
                    return
                deficit_mask |= 1 << v
                total_def += short
                if short > max_def:
                    max_def = short
        if not deficit_mask:
            if size < best_size:
                best_size, best_bits = size, fam
            return
        lower = max(max_def, -(-total_def // kmax))
        if size + lower >= best_size:
            return
        while pool:
            r = pool.bit_length() - 1
            bit = 1 << r
            if r & deficit_mask:
                grown = fam | sub[r]
                search(grown, pool & ~grown, kmax)
                search(fam, pool ^ bit, kmax)
                return
            pool ^= bit

    complete = True
    try:
        for k in range(n, 0, -1):
            # a vertex lies in at most sum_{j<k} C(n-1, j) sets of size <= k
            if sum(comb(n - 1, j) for j in range(k)) < delta:
                continue
            top = (1 << k) - 1
            start = sub[top]
            search(start, at_most[k] & ~start, k)
    except _Timeout:
        complete = False
    if best_bits is None:
        return BnbResult(None, None, complete, nodes)
    return BnbResult(best_size, best_bits, complete, nodes)
