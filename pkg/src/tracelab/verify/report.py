"""The common result type of every checker."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ..family import SetFamily, family_to_json
from ..weights import fmt_rational

STATUSES = ("pass", "fail", "rejected", "skipped")


@dataclass
class Counterexample:
    """A family violating ``inequality``; ``lhs`` and ``rhs`` are the exact sides."""

    family: SetFamily
    inequality: str
    lhs: Any
    rhs: Any
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "family": family_to_json(self.family),
            "inequality": self.inequality,
            "lhs": _fmt(self.lhs),
            "rhs": _fmt(self.rhs),
            "params": self.params,
        }


def _fmt(x: Any) -> Any:
    if isinstance(x, Fraction):
        return fmt_rational(x)
    return x


@dataclass
class CheckReport:
    """Outcome of one checker run.

    ``examined`` counts instances looked at; ``passed`` and ``skipped`` split
    them, so a skipped instance never counts as passed.
    """

    check_id: str
    params: dict
    status: str = "pass"
    examined: int = 0
    passed: int = 0
    skipped: int = 0
    counterexample: Counterexample | None = None
    min_slack: Fraction | float | None = None
    runtime: float = 0.0
    reason: str | None = None
    details: dict = field(default_factory=dict)
    classification: Any = None

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def fail(self, cex: Counterexample) -> None:
        self.status = "fail"
        self.counterexample = cex

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "check": self.check_id,
            "params": self.params,
            "status": self.status,
            "pass": self.ok,
            "examined": self.examined,
            "passed": self.passed,
            "skipped": self.skipped,
            "min_slack": None if self.min_slack is None else _slack(self.min_slack),
            "counterexample": None if self.counterexample is None else self.counterexample.to_json(),
            "reason": self.reason,
            "details": self.details,
        }
        if include_timing:
            out["runtime"] = round(self.runtime, 3)
        return out


def _slack(x: Fraction | float) -> str | float:
    return fmt_rational(x) if isinstance(x, Fraction) else x


def min_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)
