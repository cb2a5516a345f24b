import json

from tracelab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exact_payload(capsys):
    code, out, err = run(capsys, "exact", "--n", "5", "--s", "12", "--jobs", "1")
    doc = json.loads(out)
    assert code == 0 and doc["value"] == 28 and doc["optimal"] is True
    assert "millis" not in doc and "m(n,s)" in err
    assert out.count("\n") == 1


def test_exact_timing_and_cache_hit(capsys, tmp_path):
    cache = str(tmp_path / "c.json")
    run(capsys, "exact", "--n", "4", "--s", "3", "--cache", cache)
    code, out, err = run(capsys, "exact", "--n", "4", "--s", "3", "--cache", cache, "--timing")
    assert code == 0 and "cache hit" in err and "millis" in json.loads(out)


def test_exact_timeout_exit_code(capsys):
    code, out, _ = run(capsys, "exact", "--n", "8", "--s", "3", "--backend", "bnb", "--timeout", "0", "--no-cache")
    assert code == 3 and json.loads(out)["optimal"] is False


def test_usage_errors_keep_stdout_clean(capsys):
    code, out, err = run(capsys, "exact", "--bogus")
    assert code == 2 and out == "" and "usage" in err
    code, out, _ = run(capsys, "formula", "--d", "3", "--c", "1", "--n", "4")
    assert code == 2 and out == ""
    code, out, _ = run(capsys, "frobnicate")
    assert code == 2 and out == ""


def test_formula(capsys):
    code, out, _ = run(capsys, "formula", "--d", "5", "--c", "4", "--n", "10")
    doc = json.loads(out)
    assert code == 0 and doc["value"] == 56 and doc["source"] == "thm_1_4"


def test_arrows(capsys):
    code, out, _ = run(capsys, "arrows", "--n", "3", "--m", "4", "--a", "2", "--b", "4")
    doc = json.loads(out)
    assert code == 0 and doc["holds"] is False and doc["counterexample"]["n"] == 3


def test_construct_and_certify(capsys, tmp_path):
    fam = tmp_path / "nl.json"
    code, out, _ = run(capsys, "construct", "nonlocal", "--d", "5", "--k", "1", "--out", str(fam))
    assert code == 0 and json.loads(out)["certificate"]["implied_bound"] == 53
    code, out, _ = run(capsys, "certify", "--family", str(fam), "--s", "11")
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = run(capsys, "certify", "--family", str(fam), "--s", "12")
    assert code == 1 and json.loads(out)["pass"] is False
    code, out, _ = run(capsys, "construct", "f0", "--d", "3", "--c", "1", "--n", "6")
    assert code == 0 and "family" in json.loads(out)["certificate"]


def test_enumerate(capsys, tmp_path):
    code, out, _ = run(capsys, "enumerate", "--n", "4", "--count-only")
    assert json.loads(out)["count"] == 168
    emit = tmp_path / "d.jsonl"
    code, out, _ = run(capsys, "enumerate", "--n", "3", "--min-degree", "2", "--emit", str(emit))
    lines = emit.read_text().splitlines()
    assert len(lines) == json.loads(out)["count"]
    assert all(json.loads(line).startswith("n=3;") for line in lines)
    assert run(capsys, "enumerate", "--n", "7")[0] == 3


def test_verify_exit_codes(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "lemma32", "--d", "3", "--report", str(report))
    assert code == 0 and json.loads(report.read_text()) == json.loads(out)
    fam = tmp_path / "nl.json"
    run(capsys, "construct", "nonlocal", "--d", "5", "--k", "1", "--out", str(fam))
    code, out, _ = run(capsys, "verify", "replay", "--d", "5", "--c", "4", "--scheme", "small-c", "--family", str(fam))
    assert code == 1 and json.loads(out)["status"] == "rejected"
    assert run(capsys, "verify", "lemma31")[0] == 2


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--n-max", "3", "--s-max", "4", "--no-cache")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n,s,value,optimal,source,conflict"
    rows = {tuple(line.split(",")[:2]): line.split(",") for line in lines[1:]}
    assert rows[("3", "1")][2:5] == ["5", "true", "exact+thm_1_4"]
    assert rows[("3", "3")][4] == "exact+thm_1_2"
    assert rows[("3", "0")][5] == "thm_1_4(d=3;c=4)=4"


def test_record(capsys, tmp_path):
    rec = tmp_path / "run.json"
    code, out, _ = run(capsys, "formula", "--d", "2", "--c", "1", "--n", "4", "--record", str(rec))
    doc = json.loads(rec.read_text())
    assert doc["subcommand"] == "formula" and doc["payload"] == json.loads(out)
    assert doc["params"]["d"] == 2 and "wall_time" in doc


def test_jobs_env_does_not_change_payload(capsys, monkeypatch):
    outs = []
    for env in ("1", "3"):
        monkeypatch.setenv("TRACELAB_JOBS", env)
        outs.append(run(capsys, "exact", "--n", "5", "--s", "6", "--no-cache")[1])
    assert outs[0] == outs[1]
