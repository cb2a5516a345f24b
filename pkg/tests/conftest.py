from __future__ import annotations

import pytest

import oracles


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    # never touch the user's real cache from tests
    monkeypatch.setenv("TRACELAB_CACHE", str(tmp_path / "cache.json"))
    monkeypatch.delenv("TRACELAB_JOBS", raising=False)


@pytest.fixture(scope="session")
def hereditary_by_n():
    return {n: oracles.brute_hereditary(n) for n in range(5)}


_CRITERIA = {
    "1": "exact values against the closed forms",
    "2": "m(6,1) and m(6,0) adjudication",
    "3": "construction certificates",
    "4": "exhaustive lemma suites",
    "5": "arrowing oracle equivalence",
    "6": "weight replay",
    "7": "determinism across worker counts",
}
_outcomes: dict[str, list[tuple[str, str]]] = {}


def _criterion(nodeid: str) -> str | None:
    if "test_acceptance.py::test_criterion_" not in nodeid:
        return None
    return nodeid.split("test_criterion_", 1)[1][0]


def pytest_runtest_logreport(report):
    key = _criterion(report.nodeid)
    if key is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        name = report.nodeid.split("::", 1)[1]
        _outcomes.setdefault(key, []).append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_outcomes):
        runs = _outcomes[key]
        bad = [name for name, outcome in runs if outcome != "passed"]
        verdict = "PASS" if not bad else "FAIL"
        extra = f" (failed: {', '.join(bad)})" if bad else ""
        terminalreporter.write_line(f"criterion {key}: {verdict} - {_CRITERIA[key]}, {len(runs)} test(s){extra}")
