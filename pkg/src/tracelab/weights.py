"""Exact rational weights: W(m), Katona lower bounds and uniform vertex weights."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Iterable

from .errors import CapacityError, DomainError
from .family import SetFamily, link

Rational = Fraction

MAX_PREFIX = 1 << 20


def _q(x) -> Fraction:
    if isinstance(x, (list, tuple)):
        return Fraction(int(x[0]), int(x[1]))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class WeightFn:
    """A monotone non-increasing ``f: N0 -> Q`` given by a table plus a constant tail.

    ``f(k) = table[k]`` for ``k < len(table)`` and ``tail`` beyond.
    """

    table: tuple[Fraction, ...]
    tail: Fraction
    name: str = ""

    def __post_init__(self) -> None:
        table = tuple(_q(x) for x in self.table)
        tail = _q(self.tail)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "tail", tail)
        for a, b in zip(table, table[1:]):
            if b > a:
                raise DomainError("weight function must be non-increasing")
        if table and tail > table[-1]:
            raise DomainError("tail exceeds the last table value")

    def __call__(self, k: int) -> Fraction:
        return self.table[k] if k < len(self.table) else self.tail

    @classmethod
    def from_callable(cls, fn: Callable[[int], object], size: int, tail=0, name: str = ""):
        return cls(tuple(_q(fn(k)) for k in range(size)), _q(tail), name)

    @classmethod
    def harmonic(cls, size: int = 65) -> "WeightFn":
        """``1/(k+1)``, exact for every set size below ``size``."""
        return cls.from_callable(lambda k: Fraction(1, k + 1), size, 0, "1/(k+1)")

    @classmethod
    def threshold(cls, s: int) -> "WeightFn":
        """1 for ``k <= s``, 0 above: the layer-counting function."""
        return cls((1,) * (s + 1), 0, f"[k<={s}]")

    @classmethod
    def constant(cls, value=1) -> "WeightFn":
        return cls((), _q(value), f"const {value}")

    def denominator_lcm(self) -> int:
        out = self.tail.denominator
        for x in self.table:
            out = math.lcm(out, x.denominator)
        return out

    def to_json(self) -> dict:
        return {
            "table": [[str(x.numerator), str(x.denominator)] for x in self.table],
            "tail": [str(self.tail.numerator), str(self.tail.denominator)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WeightFn":
        return cls(tuple(_q(x) for x in obj["table"]), _q(obj["tail"]))


def default_battery() -> list[WeightFn]:
    """Weight functions used by the exhaustive Katona check."""
    return [
        WeightFn.harmonic(),
        WeightFn.constant(1),
        WeightFn.threshold(0),
        WeightFn.threshold(1),
        WeightFn.threshold(2),
        WeightFn.from_callable(lambda k: Fraction(1, 2**k), 65, 0, "2^-k"),
        WeightFn.from_callable(lambda k: Fraction(1, (k + 1) ** 2), 65, 0, "1/(k+1)^2"),
        WeightFn.from_callable(lambda k: 3 - k, 7, -4, "3-k"),
    ]


def colex_level_counts(m: int) -> list[int]:
    """Number of ``i``-sets among the first ``m`` colex sets, for each ``i``.

    Counts integers in ``[0, m)`` by popcount, digit by digit.
    """
    if m < 0:
        raise DomainError("m must be non-negative")
    width = max(m.bit_length(), 1)
    counts = [0] * (width + 1)
    ones = 0
    for i in range(width - 1, -1, -1):
        if m >> i & 1:
            # prefix of m above bit i, a 0 at bit i, anything below
            for j in range(i + 1):
                counts[ones + j] += comb(i, j)
            ones += 1
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    return counts


def _check_prefix(m: int) -> None:
    if m < 0:
        raise DomainError("m must be non-negative")
    if m > MAX_PREFIX:
        raise CapacityError(f"m={m} exceeds 2^20")


def family_weight(family: SetFamily | Iterable[int], f: WeightFn) -> Fraction:
    """``sum f(|F|)`` over the edges."""
    edges = family.edges if isinstance(family, SetFamily) else family
    by_size: dict[int, int] = {}
    for e in edges:
        k = e.bit_count()
        by_size[k] = by_size.get(k, 0) + 1
    return sum((cnt * f(k) for k, cnt in by_size.items()), Fraction(0))


def katona_bound(m: int, f: WeightFn) -> Fraction:
    """``sum f(|R|)`` over ``R(m)``: the least weight of a hereditary family of size ``m``."""
    _check_prefix(m)
    return sum((cnt * f(k) for k, cnt in enumerate(colex_level_counts(m))), Fraction(0))


def W(m: int) -> Fraction:
    """``sum 1/(|R|+1)`` over ``R(m)``."""
    _check_prefix(m)
    return sum(
        (Fraction(cnt, k + 1) for k, cnt in enumerate(colex_level_counts(m))), Fraction(0)
    )


def uniform_vertex_weight(family: SetFamily, v: int) -> Fraction:
    """``sum 1/(|H|+1)`` over the link of ``v``: each edge's unit split evenly."""
    by_size: dict[int, int] = {}
    for h in link(family, v).edges:
        k = h.bit_count()
        by_size[k] = by_size.get(k, 0) + 1
    return sum((Fraction(cnt, k + 1) for k, cnt in by_size.items()), Fraction(0))


def uniform_weights(family: SetFamily) -> list[Fraction]:
    out = [Fraction(0)] * family.n
    for e in family.edges:
        if e:
            share = Fraction(1, e.bit_count())
            rest = e
            while rest:
                low = rest & -rest
                out[low.bit_length() - 1] += share
                rest ^= low
    return out


@dataclass(frozen=True)
class Bound21:
    d: int
    c: int
    lhs: Fraction
    rhs: float
    holds: bool
    outside_estimate_range: bool

    @property
    def slack(self) -> float:
        return float(self.lhs) - self.rhs


def bound_2_1_holds(d: int, c: int, tol: float = 1e-9) -> Bound21:
    """Check ``W(2^(d-1) - c) >= (2^d - 1)/d - c/(d - log2 c)``.

    The left side is exact; the right side is a float (``log2 1 = 0``).
    ``c = 1`` is accepted but flagged, as the estimate is only used for ``c >= 2``.
    """
    if d < 2 or not 1 <= c <= 1 << (d - 2):
        raise DomainError(f"need d >= 2 and 1 <= c <= 2^(d-2); got d={d}, c={c}")
    lhs = W((1 << (d - 1)) - c)
    rhs = ((1 << d) - 1) / d - c / (d - math.log2(c))
    return Bound21(d, c, lhs, rhs, float(lhs) >= rhs - tol, c == 1)


def fmt_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def fmt_decimal(q: Fraction) -> str:
    return f"{float(q):.6f}"
