import json
import os
import pathlib
import subprocess

import pytest

ROOT = pathlib.Path(__file__).parents[2]
CLI = os.environ.get("CONSICORE_CLI", str(ROOT / "build" / "tools" / "consicore"))
CORPUS = ROOT / "corpus"
MIXED = ROOT / "tests" / "data" / "mixed10"
DB = CORPUS / "students.json"


def cli(*args, env=None):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=env)


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "wall_ms"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def tree(out):
    return {
        str(p.relative_to(out)): strip_timing(json.loads(p.read_text())) if p.suffix == ".json" else p.read_text()
        for p in sorted(out.rglob("*"))
        if p.is_file()
    }


def test_mixed_corpus(tmp_path):
    r = cli("analyze", "--corpus", MIXED, "--out", tmp_path, "--db", DB)
    assert r.returncode == 2, r.stderr
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert len(summary) == 10
    vulnerable = [s for s in summary if s["status"] == "vulnerable"]
    assert sorted(s["app"] for s in vulnerable) == ["a01_lookup", "a02_gated", "a03_provider"]
    assert sum(s["reports"] for s in summary) == 3
    assert all(s["confirmed"] == [True] for s in vulnerable)
    assert sum(s["status"] in ("clean", "skipped") for s in summary) == 7
    assert len(list(tmp_path.glob("*/report_*.txt"))) == 3


def test_single_app_exit_codes(tmp_path):
    assert cli("analyze", CORPUS / "listing3.mapp", "--out", tmp_path / "a").returncode == 2
    r = cli("analyze", CORPUS / "unreachable.mapp", "--out", tmp_path / "b")
    assert r.returncode == 0
    assert "no vulnerable functions" in r.stdout
    bad = tmp_path / "bad.mapp"
    bad.write_text('app "bad" {\n  activity {\n}\n')
    assert cli("analyze", bad, CORPUS / "listing3.mapp", "--out", tmp_path / "c").returncode == 1
    assert (tmp_path / "c" / "listing3" / "report_1.txt").exists()


def test_emit_static_only(tmp_path):
    r = cli("analyze", CORPUS / "fig5.mapp", "--out", tmp_path, "--emit-static")
    assert r.returncode == 0, r.stderr
    static = tmp_path / "fig5" / "static"
    assert {p.name for p in static.iterdir()} == {"callgraph.json", "icfg.json", "drivers.json", "stacks.json"}
    assert not list((tmp_path / "fig5").glob("exploration_*.json"))


@pytest.fixture
def listing3_report(tmp_path):
    assert cli("analyze", CORPUS / "listing3.mapp", "--out", tmp_path / "an").returncode == 2
    return tmp_path / "an" / "listing3" / "report_1.json"


def test_replay_exploited(tmp_path, listing3_report):
    r = cli("replay", CORPUS / "listing3.mapp", "--report", listing3_report, "--db", DB, "--out", tmp_path / "r")
    assert r.returncode == 2, r.stdout + r.stderr
    outcome = json.loads((tmp_path / "r" / "replay.json").read_text())
    assert outcome["exploited"] is True


def test_replay_parametric_not_exploited(tmp_path, listing3_report):
    rep = json.loads(listing3_report.read_text())
    rep["app"] = "listing3_parametric"
    twin = tmp_path / "twin.json"
    twin.write_text(json.dumps(rep))
    r = cli("replay", CORPUS / "listing3_parametric.mapp", "--report", twin, "--db", DB, "--out", tmp_path / "r")
    assert r.returncode == 0, r.stdout + r.stderr


def test_replay_malformed_payload(tmp_path, listing3_report):
    r = cli("replay", CORPUS / "listing3.mapp", "--report", listing3_report, "--db", DB,
            "--payload", "a' or (", "--out", tmp_path / "r")
    assert r.returncode == 3


def test_replay_mismatched_app(tmp_path, listing3_report):
    r = cli("replay", CORPUS / "fig5.mapp", "--report", listing3_report, "--db", DB, "--out", tmp_path / "r")
    assert r.returncode == 1


def test_bench(tmp_path):
    r = cli("bench", "--corpus", CORPUS, "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    rows = (tmp_path / "bench.csv").read_text().strip().splitlines()
    assert len(rows) == 1 + 8 * 2
    header = rows[0].split(",")
    fig5 = {c["strategy"]: c for c in (dict(zip(header, row.split(","))) for row in rows[1:]) if c["app"] == "fig5"}
    assert int(fig5["guided"]["first_detection"]) < int(fig5["dfs"]["first_detection"])


def test_determinism(tmp_path):
    for d in ("x", "y"):
        assert cli("analyze", "--corpus", CORPUS, "--out", tmp_path / d, "--db", DB, "--seed", 7).returncode == 2
    assert tree(tmp_path / "x") == tree(tmp_path / "y")


def test_seed_env_default(tmp_path):
    env = dict(os.environ, CONSICORE_SEED="7")
    assert cli("analyze", CORPUS / "listing1.mapp", "--out", tmp_path / "e", env=env).returncode == 2
    assert cli("analyze", CORPUS / "listing1.mapp", "--out", tmp_path / "f", "--seed", 7).returncode == 2
    assert tree(tmp_path / "e") == tree(tmp_path / "f")
