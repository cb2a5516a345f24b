"""Subsets as bitmasks and set families over a ground set ``[0, n)``.

Elements are 0-based (the usual mathematical notation is 1-based). A subset is
an ``int`` whose bit ``i`` is set when element ``i`` belongs to it. That integer
is also the subset's colexicographic rank: for masks ``A != B`` the largest
element of ``A ^ B`` is the highest differing bit, and it lies in ``B`` exactly
when ``B > A`` numerically. Sorting masks as integers is therefore sorting in
colex order, and the first ``m`` sets in colex order are the masks ``0..m-1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import CapacityError, DomainError

MAX_ELEMENTS = 64
DENSE_LIMIT = 24
FORMAT_VERSION = 1


def mask_of(elements: Iterable[int]) -> int:
    mask = 0
    for e in elements:
        e = int(e)
        if not 0 <= e < MAX_ELEMENTS:
            raise CapacityError(f"element {e} outside [0, {MAX_ELEMENTS})")
        mask |= 1 << e
    return mask


def elements_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _iter_bits(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


class SetFamily:
    """A duplicate-free family of subsets of ``[0, n)``, stored colex-sorted.

    Instances are immutable. ``edges`` is a tuple of masks in increasing
    (= colex) order; equality and hashing use ``(n, edges)`` only, so a
    :class:`HereditaryFamily` equals the plain family with the same edges.
    """

    __slots__ = ("n", "edges", "_dense")

    def __init__(self, n: int, edges: Iterable[int] = ()) -> None:
        if not 0 <= n <= MAX_ELEMENTS:
            raise CapacityError(f"ground size {n} outside [0, {MAX_ELEMENTS}]")
        es = sorted({int(e) for e in edges})
        if es and (es[0] < 0 or es[-1] >> n):
            raise DomainError(f"edge outside the ground set [0, {n})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(es))
        object.__setattr__(self, "_dense", None)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __reduce__(self):
        # the default slot restore would go through the blocked __setattr__
        return (type(self)._trusted, (self.n, self.edges))

    @classmethod
    def _trusted(cls, n: int, edges: tuple[int, ...]):
        # edges must already be sorted, unique and in range
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "edges", edges)
        object.__setattr__(obj, "_dense", None)
        return obj

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]):
        return cls(n, (mask_of(s) for s in sets))

    @classmethod
    def from_dense(cls, n: int, bits: int):
        """Build from a ``2^n``-bit integer whose bit ``r`` marks the set of rank ``r``."""
        if n > DENSE_LIMIT:
            raise CapacityError(f"dense representation limited to n <= {DENSE_LIMIT}")
        bits = int(bits)
        if bits >> (1 << n):
            raise DomainError("dense bitset has ranks beyond 2^n")
        return cls._checked_trusted(n, tuple(_iter_bits(bits)))

    @classmethod
    def _checked_trusted(cls, n, edges):
        return cls._trusted(n, edges)

    @property
    def dense(self) -> int:
        """The family as a ``2^n``-bit integer (only for ``n <= 24``)."""
        if self._dense is None:
            if self.n > DENSE_LIMIT:
                raise CapacityError(f"dense representation limited to n <= {DENSE_LIMIT}")
            bits = 0
            for e in self.edges:
                bits |= 1 << e
            object.__setattr__(self, "_dense", bits)
        return self._dense

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[int]:
        return iter(self.edges)

    def __contains__(self, mask: int) -> bool:
        if self.n <= DENSE_LIMIT:
            return mask >= 0 and bool(self.dense >> mask & 1)
        return mask in set(self.edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetFamily):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, {self.sets()})"

    def sets(self) -> list[list[int]]:
        return [elements_of(e) for e in self.edges]

    def to_text(self) -> str:
        return to_text(self)

    def to_json(self) -> dict:
        return family_to_json(self)


class HereditaryFamily(SetFamily):
    """A down-closed family: every subset of an edge is an edge."""

    __slots__ = ()

    def __init__(self, n: int, edges: Iterable[int] = ()) -> None:
        super().__init__(n, edges)
        if not _is_down_closed(self.edges):
            raise DomainError("family is not hereditary")

    @classmethod
    def _checked_trusted(cls, n, edges):
        if not _is_down_closed(edges):
            raise DomainError("family is not hereditary")
        return cls._trusted(n, edges)


@dataclass(frozen=True)
class LevelProfile:
    """Edge counts by cardinality, ``counts[i]`` = number of ``i``-sets."""

    counts: tuple[int, ...]

    def __getitem__(self, i: int) -> int:
        return self.counts[i] if 0 <= i < len(self.counts) else 0

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)


def _check_vertex(family: SetFamily, v: int) -> None:
    if not 0 <= v < family.n:
        raise DomainError(f"vertex {v} outside [0, {family.n})")


def _is_down_closed(edges: Sequence[int]) -> bool:
    present = set(edges)
    for e in edges:
        rest = e
        while rest:
            low = rest & -rest
            if e ^ low not in present:
                return False
            rest ^= low
    return not edges or 0 in present


def _same_kind(family: SetFamily, n: int, edges: Iterable[int]) -> SetFamily:
    """Wrap ``edges`` as hereditary when the operation is known to preserve it."""
    cls = HereditaryFamily if isinstance(family, HereditaryFamily) else SetFamily
    return cls._trusted(n, tuple(sorted(set(edges))))


# -- basic operations ---------------------------------------------------------

def trace(family: SetFamily, t: int) -> SetFamily:
    """``{F & t : F in family}`` on the same ground set."""
    if t < 0 or t >> family.n:
        raise DomainError("trace set is not a subset of the ground set")
    return _same_kind(family, family.n, (e & t for e in family.edges))


def link(family: SetFamily, v: int) -> SetFamily:
    """Edges containing ``v``, each with ``v`` removed.

    This is the restricted reading of the link; the family ``{F - {v}}`` over
    *all* edges is ``trace(family, ground - {v})``.
    """
    _check_vertex(family, v)
    bit = 1 << v
    return _same_kind(family, family.n, (e ^ bit for e in family.edges if e & bit))


def degree(family: SetFamily, v: int) -> int:
    _check_vertex(family, v)
    bit = 1 << v
    return sum(1 for e in family.edges if e & bit)


def degrees(family: SetFamily) -> list[int]:
    deg = [0] * family.n
    for e in family.edges:
        for i in _iter_bits(e):
            deg[i] += 1
    return deg


def min_degree(family: SetFamily) -> int:
    """Minimum degree over all ``n`` ground elements (isolated ones count as 0).

    For ``n == 0`` there is no vertex; 0 is returned.
    """
    return min(degrees(family), default=0)


def neighborhood(family: SetFamily, v: int) -> int:
    """Mask of vertices sharing an edge with ``v`` (contains ``v`` unless isolated)."""
    _check_vertex(family, v)
    bit = 1 << v
    out = 0
    for e in family.edges:
        if e & bit:
            out |= e
    return out


def support(family: SetFamily) -> int:
    """Mask of non-isolated vertices."""
    out = 0
    for e in family.edges:
        out |= e
    return out


def restrict(family: SetFamily, u: int) -> SetFamily:
    """The induced family ``F[U]``: edges contained in ``u``."""
    return _same_kind(family, family.n, (e for e in family.edges if not e & ~u))


def is_hereditary(family: SetFamily) -> bool:
    return _is_down_closed(family.edges)


def down_closure(family: SetFamily) -> HereditaryFamily:
    seen = set(family.edges)
    stack = list(family.edges)
    while stack:
        e = stack.pop()
        rest = e
        while rest:
            low = rest & -rest
            sub = e ^ low
            if sub not in seen:
                seen.add(sub)
                stack.append(sub)
            rest ^= low
    if seen:
        seen.add(0)
    return HereditaryFamily._trusted(family.n, tuple(sorted(seen)))


def level_profile(family: SetFamily) -> LevelProfile:
    counts = [0] * (family.n + 1)
    for e in family.edges:
        counts[e.bit_count()] += 1
    return LevelProfile(tuple(counts))


# -- colex machinery -----------------------------------------------------------

def colex_cmp(a: int, b: int) -> int:
    """-1 if ``a`` precedes ``b`` in colex order, 1 if it follows, 0 if equal."""
    return (a > b) - (a < b)


def colex_rank(a: int) -> int:
    if a < 0 or a >> MAX_ELEMENTS:
        raise CapacityError("mask outside the 64-element capacity")
    return a


def colex_unrank(k: int) -> int:
    return colex_rank(k)


def colex_initial(m: int, n: int | None = None) -> HereditaryFamily:
    """``R(m)``: the first ``m`` subsets in colex order.

    Ranks below ``m`` are closed under taking subsets (a submask is numerically
    no larger), so the result is hereditary for every ``m``. The ground size
    defaults to the smallest ``n`` with ``m <= 2^n``.
    """
    if m < 0:
        raise DomainError("m must be non-negative")
    if m > 1 << MAX_ELEMENTS:
        raise CapacityError(f"m exceeds 2^{MAX_ELEMENTS}")
    need = (m - 1).bit_length() if m > 1 else 0
    if n is None:
        n = need
    elif m > 1 << n:
        raise CapacityError(f"R({m}) does not fit on {n} elements")
    return HereditaryFamily._trusted(n, tuple(range(m)))


# -- shattering ---------------------------------------------------------------

def _masks_of_size(n: int, s: int) -> Iterator[int]:
    """All ``s``-subsets of ``[0, n)`` in colex order (Gosper's hack)."""
    if s == 0:
        yield 0
        return
    x = (1 << s) - 1
    limit = 1 << n
    while x < limit:
        yield x
        low = x & -x
        ripple = x + low
        x = (((ripple ^ x) >> 2) // low) | ripple


def find_shattered(family: SetFamily, s: int) -> int | None:
    """First ``s``-set (colex order) whose trace has all ``2^s`` subsets, or None."""
    if not 0 <= s <= family.n:
        raise DomainError(f"s={s} outside [0, {family.n}]")
    target = 1 << s
    if len(family) < target:
        return None
    for t in _masks_of_size(family.n, s):
        if len({e & t for e in family.edges}) == target:
            return t
    return None


# -- relabelling and gluing ---------------------------------------------------

def relabel(family: SetFamily, perm: Sequence[int]) -> SetFamily:
    """Apply the bijection ``i -> perm[i]`` to every edge."""
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(family.n)):
        raise DomainError("permutation is not a bijection on the ground set")
    out = []
    for e in family.edges:
        m = 0
        for i in _iter_bits(e):
            m |= 1 << perm[i]
        out.append(m)
    return _same_kind(family, family.n, out)


def disjoint_union(f: SetFamily, g: SetFamily) -> SetFamily:
    """``f`` on ``[0, f.n)`` next to ``g`` shifted to ``[f.n, f.n + g.n)``; ∅ merges."""
    n = f.n + g.n
    if n > MAX_ELEMENTS:
        raise CapacityError("union exceeds the 64-element capacity")
    shift = f.n
    edges = set(f.edges)
    edges.update(e << shift for e in g.edges)
    hereditary = isinstance(f, HereditaryFamily) and isinstance(g, HereditaryFamily)
    cls = HereditaryFamily if hereditary else SetFamily
    return cls._trusted(n, tuple(sorted(edges)))


def power_set(n: int, elements: int | None = None) -> HereditaryFamily:
    """All subsets of ``elements`` (default: the whole ground set)."""
    if elements is None:
        elements = (1 << n) - 1
    subs = []
    sub = elements
    while True:
        subs.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & elements
    return HereditaryFamily._trusted(n, tuple(sorted(subs)))


# -- serialization --------------------------------------------------------------

def family_to_json(family: SetFamily) -> dict:
    return {"version": FORMAT_VERSION, "n": family.n, "edges": family.sets()}


def family_from_json(obj: dict, hereditary: bool = False) -> SetFamily:
    if obj.get("version") != FORMAT_VERSION:
        raise DomainError(f"unsupported family format version {obj.get('version')!r}")
    cls = HereditaryFamily if hereditary else SetFamily
    return cls.from_sets(int(obj["n"]), obj["edges"])


def dumps_family(family: SetFamily) -> str:
    return json.dumps(family_to_json(family), separators=(",", ":")) + "\n"


def save_family(family: SetFamily, path: str | Path) -> None:
    Path(path).write_text(dumps_family(family))


def load_family(path: str | Path, hereditary: bool = False) -> SetFamily:
    return family_from_json(json.loads(Path(path).read_text()), hereditary=hereditary)


def to_text(family: SetFamily) -> str:
    """One-line form ``n=<k>;<hex rank>,...`` with ranks ascending."""
    return f"n={family.n};" + ",".join(format(e, "x") for e in family.edges)


def from_text(line: str, hereditary: bool = False) -> SetFamily:
    head, _, body = line.strip().partition(";")
    if not head.startswith("n="):
        raise DomainError(f"malformed family line: {line!r}")
    n = int(head[2:])
    ranks = [int(tok, 16) for tok in body.split(",") if tok]
    cls = HereditaryFamily if hereditary else SetFamily
    return cls(n, ranks)


def subsets_of_size(n: int, s: int) -> Iterator[int]:
    """Public alias of the colex-ordered ``s``-subset generator."""
    return _masks_of_size(n, s)

