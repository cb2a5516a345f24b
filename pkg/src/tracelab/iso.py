"""Isomorphism of small families up to isolated vertices."""

from __future__ import annotations

from itertools import permutations, product

from .errors import ResourceLimitError
from .family import SetFamily, elements_of, support

MAX_ISO_VERTICES = 8


def compress(family: SetFamily) -> tuple[int, tuple[int, ...], list[int]]:
    """Drop isolated vertices: returns ``(k, edges on [0,k), original labels)``."""
    labels = elements_of(support(family))
    pos = {v: i for i, v in enumerate(labels)}
    edges = []
    for e in family.edges:
        m = 0
        for v in elements_of(e):
            m |= 1 << pos[v]
        edges.append(m)
    return len(labels), tuple(sorted(edges)), labels


def _invariants(k: int, edges) -> list[tuple]:
    # degree split by edge size, then one refinement round over neighbours
    size_deg = [[0] * (k + 1) for _ in range(k)]
    for e in edges:
        s = e.bit_count()
        for v in elements_of(e):
            size_deg[v][s] += 1
    base = [tuple(row) for row in size_deg]
    nbr = [0] * k
    for e in edges:
        for v in elements_of(e):
            nbr[v] |= e
    return [
        (base[v], tuple(sorted(base[w] for w in elements_of(nbr[v]) if w != v)))
        for v in range(k)
    ]


def _checked(family: SetFamily):
    k, edges, labels = compress(family)
    if k > MAX_ISO_VERTICES:
        raise ResourceLimitError(
            f"{k} non-isolated vertices; isomorphism is limited to {MAX_ISO_VERTICES}"
        )
    return k, edges, labels


def find_isomorphism(f: SetFamily, g: SetFamily) -> dict[int, int] | None:
    """A vertex map from ``f``'s non-isolated vertices onto ``g``'s, or None.

    Backtracking over vertices, restricted to equal invariants; an edge of
    ``f`` is checked as soon as all its vertices are mapped.
    """
    kf, ef, lf = _checked(f)
    kg, eg, lg = _checked(g)
    if kf != kg or len(ef) != len(eg):
        return None
    inv_f, inv_g = _invariants(kf, ef), _invariants(kg, eg)
    if sorted(inv_f) != sorted(inv_g):
        return None
    k = kf
    eg_set = set(eg)
    # rarest invariant classes first
    freq: dict[tuple, int] = {}
    for x in inv_f:
        freq[x] = freq.get(x, 0) + 1
    order = sorted(range(k), key=lambda v: (freq[inv_f[v]], v))
    position = {v: i for i, v in enumerate(order)}
    closing: list[list[int]] = [[] for _ in range(k)]
    for e in ef:
        if e:
            last = max(position[v] for v in elements_of(e))
            closing[last].append(e)
    candidates = [[w for w in range(k) if inv_g[w] == inv_f[v]] for v in order]
    image = [0] * k
    used = [False] * k

    def mapped(e: int) -> int:
        m = 0
        for v in elements_of(e):
            m |= 1 << image[v]
        return m

    def extend(i: int) -> bool:
        if i == k:
            return True
        v = order[i]
        for w in candidates[i]:
            if used[w]:
                continue
            image[v] = w
            if all(mapped(e) in eg_set for e in closing[i]):
                used[w] = True
                if extend(i + 1):
                    return True
                used[w] = False
        return False

    if (0 in ef) != (0 in eg_set):
        return None
    if not extend(0):
        return None
    return {lf[v]: lg[image[v]] for v in range(k)}


def iso_up_to_isolated(f: SetFamily, g: SetFamily) -> bool:
    """True iff deleting isolated vertices leaves isomorphic hypergraphs.

    Raises :class:`ResourceLimitError` when either side has more than eight
    non-isolated vertices.
    """
    return find_isomorphism(f, g) is not None


def canonical_form(family: SetFamily) -> tuple:
    """A complete isomorphism invariant (up to isolated vertices).

    Vertices are ordered by invariant; the lexicographically least sorted edge
    tuple over all orderings consistent with that order is the certificate.
    """
    k, edges, _ = _checked(family)
    inv = _invariants(k, edges)
    keys = sorted(set(inv))
    blocks = [[v for v in range(k) if inv[v] == key] for key in keys]
    best = None
    for choice in product(*(permutations(b) for b in blocks)):
        order = [v for block in choice for v in block]
        pos = {v: i for i, v in enumerate(order)}
        relabelled = []
        for e in edges:
            m = 0
            for v in elements_of(e):
                m |= 1 << pos[v]
            relabelled.append(m)
        cand = tuple(sorted(relabelled))
        if best is None or cand < best:
            best = cand
    return (k, tuple(sorted(inv)), best)
