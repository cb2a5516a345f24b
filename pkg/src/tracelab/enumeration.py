"""Exhaustive enumeration of hereditary families (down-sets of ``2^[n]``).

A family is handled as a dense bitset: bit ``r`` is set when the subset of
colex rank ``r`` is an edge. Splitting on the top element ``n-1`` writes every
down-set of ``2^[n]`` uniquely as ``A | B << 2^(n-1)`` where ``A`` (edges
avoiding ``n-1``) and ``B`` (the link of ``n-1``) are down-sets of
``2^[n-1]`` with ``B ⊆ A``. The traversal walks ``A`` in table order and, for
each ``A``, emits the block of all admissible ``B`` at once as a numpy array.
Blocks are the unit of filtering, folding and parallel partitioning.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from multiprocessing import get_context
from typing import Any, Callable, Iterable, Iterator

import numpy as np

from .errors import DomainError, ResourceLimitError
from .family import HereditaryFamily

TABLE_LIMIT = 6
MAX_N = 7
DEDEKIND = (2, 3, 6, 20, 168, 7581, 7828354, 2414682040998)


@dataclass(frozen=True)
class EnumFilter:
    min_degree: int | None = None
    max_edges: int | None = None
    min_edges: int | None = None
    require_spanning: bool = False

    def __post_init__(self) -> None:
        for name in ("min_degree", "max_edges", "min_edges"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise DomainError(f"{name} must be non-negative")
        if (
            self.min_edges is not None
            and self.max_edges is not None
            and self.min_edges > self.max_edges
        ):
            raise DomainError("min_edges exceeds max_edges")

    @property
    def degree_threshold(self) -> int:
        d = self.min_degree or 0
        return max(d, 1) if self.require_spanning else d

    @property
    def active(self) -> bool:
        return bool(self.degree_threshold) or self.max_edges is not None or self.min_edges is not None

    def accepts(self, n: int, bits: int) -> bool:
        """Re-check the predicate on one family (used to audit emissions)."""
        fam = HereditaryFamily.from_dense(n, bits)
        from .family import min_degree

        size = len(fam)
        if self.min_edges is not None and size < self.min_edges:
            return False
        if self.max_edges is not None and size > self.max_edges:
            return False
        return n == 0 or min_degree(fam) >= self.degree_threshold


NO_FILTER = EnumFilter()


def default_jobs() -> int:
    return max(1, int(os.environ.get("TRACELAB_JOBS", "1")))


@lru_cache(maxsize=None)
def vertex_masks(k: int) -> tuple[int, ...]:
    """Dense masks over ``2^k`` ranks: ``masks[v]`` has bit ``r`` set iff ``v in r``."""
    return tuple(
        sum(1 << r for r in range(1 << k) if r >> v & 1) for v in range(k)
    )


@lru_cache(maxsize=None)
def level_masks(k: int) -> tuple[int, ...]:
    return tuple(
        sum(1 << r for r in range(1 << k) if r.bit_count() == j) for j in range(k + 1)
    )


@lru_cache(maxsize=None)
def subset_masks(k: int) -> tuple[int, ...]:
    """``subset_masks(k)[t]``: dense mask of all ranks that are subsets of ``t``."""
    out = []
    for t in range(1 << k):
        m, sub = 0, t
        while True:
            m |= 1 << sub
            if sub == 0:
                break
            sub = (sub - 1) & t
        out.append(m)
    return tuple(out)


def popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x).astype(np.int64)


def _check_n(n: int, allow_huge: bool = False) -> None:
    if n < 0:
        raise DomainError("n must be non-negative")
    if n > MAX_N:
        raise ResourceLimitError(f"enumeration is limited to n <= {MAX_N}")
    if n == MAX_N and not allow_huge:
        raise ResourceLimitError(
            "n=7 has about 2.4e12 down-sets; pass allow_huge=True (--allow-huge) to proceed"
        )


def _spread(x: np.ndarray, k: int) -> np.ndarray:
    """Relabel element ``i`` as ``i+1``: rank bit ``r`` moves to bit ``2r``."""
    out = np.zeros_like(x)
    one = np.uint64(1)
    for r in range(1 << k):
        out |= ((x >> np.uint64(r)) & one) << np.uint64(2 * r)
    return out


@lru_cache(maxsize=None)
def downset_table(n: int, split: str = "top") -> np.ndarray:
    """All down-sets of ``2^[n]`` as ``uint64`` dense bitsets (``n <= 6``).

    ``split="top"`` decomposes on element ``n-1`` (the canonical stream order);
    ``split="bottom"`` decomposes on element 0 and serves as an independent
    cross-check of the same set.
    """
    if not 0 <= n <= TABLE_LIMIT:
        raise ResourceLimitError(f"dense table limited to n <= {TABLE_LIMIT}")
    if split not in ("top", "bottom"):
        raise DomainError(f"unknown split {split!r}")
    if n == 0:
        out = np.array([0, 1], dtype=np.uint64)
    else:
        lower = downset_table(n - 1, split)
        parts = []
        if split == "top":
            shift = np.uint64(1 << (n - 1))
            for a in lower:
                parts.append(a | (lower[(lower & ~a) == 0] << shift))
        else:
            spread = _spread(lower, n - 1)
            one = np.uint64(1)
            for a, a_spread in zip(lower, spread):
                parts.append(a_spread | (spread[(lower & ~a) == 0] << one))
        out = np.concatenate(parts)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def _table_stats(k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(table, edge counts, degree matrix)`` for down-sets of ``2^[k]``."""
    table = downset_table(k)
    pc = popcount(table)
    deg = np.empty((len(table), k), dtype=np.int64)
    for v, vm in enumerate(vertex_masks(k)):
        deg[:, v] = popcount(table & np.uint64(vm))
    for arr in (pc, deg):
        arr.flags.writeable = False
    return table, pc, deg


class Block:
    """All emitted families sharing one ``A`` (edges avoiding the top element).

    ``index`` is the position of ``A`` in the lower table, so ``(index, i)``
    is a family's position in the deterministic stream.
    """

    __slots__ = ("index", "n", "a_index", "idx")

    def __init__(self, index: int, n: int, a_index: int | None, idx: np.ndarray) -> None:
        self.index = index
        self.n = n
        self.a_index = a_index
        self.idx = idx

    def __len__(self) -> int:
        return len(self.idx)

    def families(self) -> np.ndarray | list[int]:
        if self.n == 0:
            return downset_table(0)[self.idx]
        table = _table_stats(self.n - 1)[0]
        a = table[self.a_index]
        bs = table[self.idx]
        if self.n <= TABLE_LIMIT:
            return a | (bs << np.uint64(1 << (self.n - 1)))
        return [int(a) | (int(b) << 64) for b in bs]

    def edge_counts(self) -> np.ndarray:
        if self.n == 0:
            return popcount(downset_table(0)[self.idx])
        _, pc, _ = _table_stats(self.n - 1)
        return pc[self.a_index] + pc[self.idx]

    def degrees(self) -> np.ndarray:
        """Degree matrix of shape ``(len(self), n)``."""
        if self.n == 0:
            return np.zeros((len(self.idx), 0), dtype=np.int64)
        _, pc, deg = _table_stats(self.n - 1)
        lower = deg[self.a_index] + deg[self.idx]
        return np.column_stack([lower, pc[self.idx]])

    def min_degrees(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros(len(self.idx), dtype=np.int64)
        return self.degrees().min(axis=1)


def _part_range(total: int, part: tuple[int, int] | None) -> range:
    if part is None:
        return range(total)
    i, parts = part
    if not 0 <= i < parts:
        raise DomainError(f"bad partition {part}")
    return range(i * total // parts, (i + 1) * total // parts)


def num_blocks(n: int) -> int:
    return 1 if n == 0 else len(downset_table(n - 1))


def iter_blocks(
    n: int,
    filt: EnumFilter = NO_FILTER,
    part: tuple[int, int] | None = None,
    allow_huge: bool = False,
) -> Iterator[Block]:
    """Yield non-empty blocks of down-sets on ``[n]`` passing ``filt``."""
    _check_n(n, allow_huge)
    delta = filt.degree_threshold
    if n == 0:
        if part is not None and part[0] != 0:
            return
        idx = np.arange(2)
        block = Block(0, 0, None, idx)
        keep = _edge_keep(block.edge_counts(), filt)
        if keep is not None:
            idx = idx[keep]
        if len(idx):
            yield Block(0, 0, None, idx)
        return
    table, pc, deg = _table_stats(n - 1)
    min_b_edges = delta
    for j in _part_range(len(table), part):
        # B ⊆ A bounds every degree of the result by 2*deg_A(v), and deg(n-1) by |A|
        if delta and (pc[j] < delta or (deg.shape[1] and 2 * deg[j].min() < delta)):
            continue
        if filt.max_edges is not None and pc[j] + min_b_edges > filt.max_edges:
            continue
        a = table[j]
        idx = np.flatnonzero((table & ~a) == 0)
        block = Block(j, n, j, idx)
        if filt.active:
            keep = _edge_keep(block.edge_counts(), filt)
            if delta:
                dk = block.degrees().min(axis=1) >= delta
                keep = dk if keep is None else keep & dk
            if keep is not None:
                block.idx = idx[keep]
        if len(block.idx):
            yield block


def _edge_keep(edges: np.ndarray, filt: EnumFilter) -> np.ndarray | None:
    keep = None
    if filt.min_edges is not None:
        keep = edges >= filt.min_edges
    if filt.max_edges is not None:
        k2 = edges <= filt.max_edges
        keep = k2 if keep is None else keep & k2
    return keep


@dataclass(frozen=True)
class EnumResult:
    count: int
    complete: bool


def enumerate_downsets(
    n: int,
    filt: EnumFilter = NO_FILTER,
    visitor: Callable[[int], Any] | None = None,
    *,
    allow_huge: bool = False,
    part: tuple[int, int] | None = None,
) -> EnumResult:
    """Visit every down-set on ``[n]`` passing ``filt`` exactly once.

    ``visitor`` receives the dense bitset as a Python ``int``; returning
    ``False`` stops the traversal (``complete=False`` in the result).
    """
    count = 0
    for block in iter_blocks(n, filt, part, allow_huge):
        if visitor is None:
            count += len(block)
            continue
        for f in block.families():
            count += 1
            if visitor(int(f)) is False:
                return EnumResult(count, False)
    return EnumResult(count, True)


def iter_downsets(n: int, filt: EnumFilter = NO_FILTER, allow_huge: bool = False) -> Iterator[int]:
    for block in iter_blocks(n, filt, allow_huge=allow_huge):
        for f in block.families():
            yield int(f)


# -- folding -------------------------------------------------------------------

class Reducer:
    """Associative, commutative fold over blocks with an identity element."""

    identity: Any = None

    def block(self, block: Block) -> Any:
        raise NotImplementedError

    def combine(self, x: Any, y: Any) -> Any:
        raise NotImplementedError


class CountReducer(Reducer):
    identity = 0

    def block(self, block: Block) -> int:
        return len(block)

    def combine(self, x: int, y: int) -> int:
        return x + y


class MinEdgesReducer(Reducer):
    """Least ``(edge count, dense bitset)``: fewest edges, then colex-least family."""

    identity = None

    def block(self, block: Block):
        edges = block.edge_counts()
        best = int(edges.min())
        fams = block.families()
        if isinstance(fams, np.ndarray):
            fam = int(fams[edges == best].min())
        else:
            fam = min(f for f, e in zip(fams, edges) if e == best)
        return (best, fam)

    def combine(self, x, y):
        if x is None:
            return y
        if y is None:
            return x
        return min(x, y)


class MinEdgesByDegreeReducer(Reducer):
    """For every minimum degree ``t`` seen: least ``(edges, bitset)`` with that minimum degree."""

    identity: dict = {}

    def block(self, block: Block) -> dict:
        mins = block.min_degrees()
        edges = block.edge_counts()
        fams = block.families()
        out = {}
        for t in np.unique(mins):
            sel = mins == t
            e = edges[sel]
            best = int(e.min())
            cand = np.asarray(fams)[sel][e == best] if isinstance(fams, np.ndarray) else [
                f for f, ok, ee in zip(fams, sel, edges) if ok and ee == best
            ]
            out[int(t)] = (best, int(min(cand)))
        return out

    def combine(self, x: dict, y: dict) -> dict:
        out = dict(x)
        for t, val in y.items():
            out[t] = min(out[t], val) if t in out else val
        return out


@dataclass(frozen=True)
class FoldResult:
    value: Any
    complete: bool
    examined: int


def _fold_part(n, filt, reducer, part, allow_huge, deadline) -> FoldResult:
    acc = reducer.identity
    examined = 0
    for block in iter_blocks(n, filt, part, allow_huge):
        acc = reducer.combine(acc, reducer.block(block))
        examined += len(block)
        if deadline is not None and time.time() > deadline:
            return FoldResult(acc, False, examined)
    return FoldResult(acc, True, examined)


def fold_downsets(
    n: int,
    filt: EnumFilter,
    reducer: Reducer,
    jobs: int | None = None,
    *,
    allow_huge: bool = False,
    deadline: float | None = None,
) -> FoldResult:
    """Fold ``reducer`` over all emitted blocks, optionally across worker processes.

    The block range is cut into contiguous parts; partial results are combined
    in part order, so the value equals the sequential fold for any worker count.
    """
    _check_n(n, allow_huge)
    jobs = default_jobs() if jobs is None else jobs
    if jobs <= 1:
        return _fold_part(n, filt, reducer, None, allow_huge, deadline)
    parts = min(jobs * 4, num_blocks(n))
    # build tables before forking so workers inherit them
    if n >= 1:
        _table_stats(n - 1)
    with ProcessPoolExecutor(max_workers=jobs, mp_context=get_context("fork")) as pool:
        futures = [
            pool.submit(_fold_part, n, filt, reducer, (i, parts), allow_huge, deadline)
            for i in range(parts)
        ]
        results = [f.result() for f in futures]
    acc = reducer.identity
    for r in results:
        acc = reducer.combine(acc, r.value)
    return FoldResult(
        acc, all(r.complete for r in results), sum(r.examined for r in results)
    )


def enumerate_downsets_parallel(
    n: int, filt: EnumFilter, reducer: Reducer, jobs: int | None = None, *, allow_huge: bool = False
) -> Any:
    return fold_downsets(n, filt, reducer, jobs, allow_huge=allow_huge).value


# -- general families and isomorphism-reduced views ----------------------------

def all_families(n: int) -> np.ndarray:
    """Every subset of ``2^[n]`` as a dense bitset (``n <= 4``)."""
    if not 0 <= n <= 4:
        raise ResourceLimitError("the 2^(2^n) scan is limited to n <= 4")
    return np.arange(1 << (1 << n), dtype=np.uint64)


def dedup_isomorphic(n: int, families: Iterable[int]) -> list[int]:
    """Keep the first family of each isomorphism class (``n <= 5``)."""
    from .family import SetFamily
    from .iso import canonical_form

    if n > 5:
        raise ResourceLimitError("isomorphism-reduced enumeration is limited to n <= 5")
    seen = set()
    out = []
    for bits in families:
        key = canonical_form(SetFamily.from_dense(n, int(bits)))
        if key not in seen:
            seen.add(key)
            out.append(int(bits))
    return out
