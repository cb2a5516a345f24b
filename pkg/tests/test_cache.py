import json

from tracelab.cache import ResultCache, default_path
from tracelab.solver import SolveResult, m_exact


def test_default_path_honours_env(tmp_path, monkeypatch):
    monkeypatch.setenv("TRACELAB_CACHE", str(tmp_path / "x.json"))
    assert default_path() == tmp_path / "x.json"


def test_roundtrip_revalidates(tmp_path):
    path = tmp_path / "c.json"
    cache = ResultCache(path)
    res = m_exact(4, 3, jobs=1)
    assert cache.put(res)
    cache.save()
    again = ResultCache(path)
    hit = again.get(4, 3, "exhaustive")
    assert hit.value == res.value and hit.witness == res.witness and hit.optimal
    assert again.get(4, 3, "branch_and_bound") is None
    assert not list(tmp_path.glob(".cache-*"))


def test_corrupted_entry_is_dropped(tmp_path, capsys):
    path = tmp_path / "c.json"
    cache = ResultCache(path)
    cache.put(m_exact(4, 3, jobs=1))
    cache.put(m_exact(3, 1, jobs=1))
    cache.save()
    doc = json.loads(path.read_text())
    doc["entries"]["4,3,exhaustive"]["result"]["value"] = 5  # witness no longer matches
    path.write_text(json.dumps(doc))
    loaded = ResultCache(path)
    assert loaded.get(4, 3, "exhaustive") is None
    assert loaded.get(3, 1, "exhaustive") is not None
    assert loaded.dropped == 1
    assert "dropping entry" in capsys.readouterr().err


def test_unreadable_file_is_ignored(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text("{not json")
    assert ResultCache(path).entries == {}
    assert "ignoring" in capsys.readouterr().err


def test_optimal_entry_is_never_replaced(tmp_path):
    cache = ResultCache(tmp_path / "c.json")
    good = m_exact(5, 3, "bnb")
    assert cache.put(good)
    worse = SolveResult(5, 3, 17, None, False, "branch_and_bound")
    assert not cache.put(worse)
    assert cache.get(5, 3, "branch_and_bound").optimal
    # a non-optimal entry gives way to a better bound or a proof
    cache2 = ResultCache(tmp_path / "d.json")
    cache2.put(SolveResult(5, 3, None, None, False, "branch_and_bound"))
    assert cache2.put(good)
