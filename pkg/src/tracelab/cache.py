"""A single-file JSON cache of computed m(n,s) values.

Entries are keyed by ``(n, s, backend)`` and store the full result payload.
Every witness is re-validated when the file is loaded; entries that fail are
dropped with a warning on stderr. Writes go to a temporary file in the same
directory followed by an atomic rename.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
import time
from pathlib import Path

from . import __version__
from .errors import TracelabError
from .family import family_from_json
from .solver import SolveResult

CACHE_VERSION = 1


def default_path() -> Path:
    env = os.environ.get("TRACELAB_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".tracelab" / "cache.json"


def _key(n: int, s: int, backend: str) -> str:
    return f"{n},{s},{backend}"


def result_from_payload(obj: dict) -> SolveResult:
    witness = obj.get("witness")
    return SolveResult(
        n=int(obj["n"]),
        s=int(obj["s"]),
        value=obj["value"],
        witness=None if witness is None else family_from_json(witness, hereditary=True),
        optimal=bool(obj["optimal"]),
        backend=obj["backend"],
        never_fails=bool(obj.get("never_fails", False)),
        stats=dict(obj.get("stats", {})),
    )


class ResultCache:
    def __init__(self, path: str | Path | None = None) -> None:
        self.path = Path(path) if path is not None else default_path()
        self.entries: dict[str, dict] = {}
        self.dropped = 0
        self._load()

    def _warn(self, msg: str) -> None:
        print(f"tracelab: cache: {msg}", file=sys.stderr)

    def _load(self) -> None:
        if not self.path.exists():
            return
        try:
            raw = json.loads(self.path.read_text())
            entries = raw["entries"]
            if raw.get("version") != CACHE_VERSION or not isinstance(entries, dict):
                raise ValueError("unknown cache layout")
        except (OSError, ValueError, KeyError, TypeError) as exc:
            self._warn(f"ignoring unreadable cache {self.path}: {exc}")
            return
        for key, entry in entries.items():
            try:
                res = result_from_payload(entry["result"])
                res.validate()
                if key != _key(res.n, res.s, res.backend):
                    raise ValueError("key does not match its entry")
            except (TracelabError, ValueError, KeyError, TypeError) as exc:
                self.dropped += 1
                self._warn(f"dropping entry {key!r}: {exc}")
                continue
            self.entries[key] = entry

    def get(self, n: int, s: int, backend: str) -> SolveResult | None:
        entry = self.entries.get(_key(n, s, backend))
        if entry is None:
            return None
        res = result_from_payload(entry["result"])
        res.stats["millis"] = entry.get("millis")
        return res

    def put(self, res: SolveResult) -> bool:
        """Store ``res`` unless it would replace a better entry. Returns True if stored."""
        key = _key(res.n, res.s, res.backend)
        old = self.entries.get(key)
        if old is not None:
            prev = old["result"]
            if prev["optimal"] and not res.optimal:
                return False
            if prev["optimal"] == res.optimal and (
                res.value is None or (prev["value"] is not None and prev["value"] <= res.value)
            ):
                return False
        self.entries[key] = {
            "result": res.to_json(),
            "millis": res.stats.get("millis"),
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "version": __version__,
        }
        return True

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        doc = {"version": CACHE_VERSION, "entries": dict(sorted(self.entries.items()))}
        fd, tmp = tempfile.mkstemp(prefix=".cache-", suffix=".json", dir=self.path.parent)
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(doc, fh, indent=1, sort_keys=True)
                fh.write("\n")
            os.replace(tmp, self.path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
