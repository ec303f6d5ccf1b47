import json
from pathlib import Path

import pytest

from pidpoker import __version__
from pidpoker.cli import atomic_write, main
from pidpoker.handparse import parse_stream, read_records
from pidpoker.infodecomp import JointDistribution3
from pidpoker.pipeline import AnalysisConfig, Variant, run_analysis
from pidpoker.synthgen import AgentPolicy, SimConfig, read_labels

FIXTURES = Path(__file__).parent / "fixtures"
CLEAN = FIXTURES / "clean_100.txt"


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for k in ("FAIL_THRESHOLD", "OUT", "SEED", "VARIANT", "RESAMPLES", "LEVELS"):
        monkeypatch.delenv("PIDPOKER_" + k, raising=False)


def run(*argv):
    return main([str(a) for a in argv])


def write_dist(path, pmf):
    path.write_text(JointDistribution3(pmf).to_text() if not isinstance(pmf, str) else pmf)
    return path


@pytest.fixture(scope="module")
def encryptor_corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("enc")
    cfg = out / "cfg.json"
    cfg.write_text(SimConfig(hero=AgentPolicy("encryptor")).to_json())
    assert run("simulate", "--config", cfg, "--hands", 1500, "--seed", 5, "--out", out) == 0
    return out


class TestParse:
    def test_clean_corpus(self, tmp_path, capsys):
        assert run("parse", CLEAN, "--out", tmp_path) == 0
        doc = json.loads((tmp_path / "parse_report.json").read_text())
        assert doc["report"]["failure_fraction"] == 0.0 and doc["report"]["parsed"] == 100
        assert doc["version"] == __version__ and doc["config"]["fail_threshold"] == 0.10
        lines = (tmp_path / "hands.jsonl").read_text().splitlines()
        assert len(lines) == 101 and json.loads(lines[0])["meta"]["command"] == "parse"
        assert "parsed 100/100" in capsys.readouterr().out

    def test_fully_corrupted(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text(CLEAN.read_text().replace("posts big blind", "posts a pineapple"))
        assert run("parse", bad, "--out", tmp_path) == 2
        rep = json.loads((tmp_path / "parse_report.json").read_text())["report"]
        assert rep["parsed"] == 0 and rep["failed"] == 100

    def test_threshold_flag(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text(CLEAN.read_text().replace("posts big blind", "posts a pineapple"))
        assert run("parse", bad, "--out", tmp_path, "--fail-threshold", 1.0) == 0

    def test_missing_path(self, tmp_path, capsys):
        assert run("parse", tmp_path / "nope.txt", "--out", tmp_path) == 1
        assert "cannot read" in capsys.readouterr().err

    def test_bad_threshold_rejected(self, tmp_path):
        with pytest.raises(SystemExit) as e:
            run("parse", CLEAN, "--fail-threshold", 2)
        assert e.value.code == 2  # argparse usage error


class TestDecompose:
    def test_xor(self, tmp_path, capsys):
        pmf = [[[0.0] * 2 for _ in range(2)] for _ in range(2)]
        for a in (0, 1):
            for b in (0, 1):
                pmf[a ^ b][a][b] = 0.25
        assert run("decompose", write_dist(tmp_path / "xor.txt", pmf)) == 0
        out = capsys.readouterr().out
        assert "synergy          1.000000" in out
        assert "redundancy       0.000000" in out and "total            1.000000" in out

    def test_independent_uniform(self, tmp_path, capsys):
        pmf = [[[1 / 27] * 3 for _ in range(3)] for _ in range(3)]
        assert run("decompose", write_dist(tmp_path / "u.txt", pmf)) == 0
        out = capsys.readouterr().out
        head = out.split("\n\n")[0]
        assert all(line.split()[1] == "0.000000" for line in head.splitlines())
        assert "-0.000000" not in out

    def test_non_normalized(self, tmp_path, capsys):
        path = write_dist(tmp_path / "n.txt", "0 0 0 0.5\n1 1 1 0.4\n")
        assert run("decompose", path) == 1
        assert "NonNormalized" in capsys.readouterr().err

    def test_malformed(self, tmp_path):
        assert run("decompose", write_dist(tmp_path / "m.txt", "0 0 zero 1\n")) == 1


class TestSimulate:
    def test_reproducible(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("simulate", "--hands", 100, "--seed", 7, "--out", a) == 0
        assert run("simulate", "--hands", 100, "--seed", 7, "--out", b) == 0
        for name in ("hands.txt", "hands.jsonl", "sim_config.json", "labels.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
        assert len(list(read_records((a / "hands.jsonl").open()))) == 100
        records, report = parse_stream((a / "hands.txt").read_text())
        assert report.failure_fraction == 0 and len(records) == 100

    def test_zero_hands(self, tmp_path):
        assert run("simulate", "--hands", 0, "--out", tmp_path) == 0
        assert (tmp_path / "hands.txt").read_text() == ""
        assert len((tmp_path / "hands.jsonl").read_text().splitlines()) == 1

    def test_config_round_trip(self, tmp_path):
        assert run("simulate", "--hands", 3, "--seed", 2, "--out", tmp_path) == 0
        doc = json.loads((tmp_path / "sim_config.json").read_text())
        assert doc["version"] == __version__ and doc["config"]["seed"] == 2
        again = tmp_path / "again"
        assert run("simulate", "--config", tmp_path / "sim_config.json", "--out", again) == 0
        assert (again / "hands.txt").read_bytes() == (tmp_path / "hands.txt").read_bytes()

    def test_invalid_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"hands": 5, "bogus": 1}))
        assert run("simulate", "--config", cfg, "--out", tmp_path) == 1
        cfg.write_text("[]")
        assert run("simulate", "--config", cfg, "--out", tmp_path) == 1

    def test_labels_written(self, tmp_path):
        assert run("simulate", "--hands", 2, "--out", tmp_path) == 0
        assert set(read_labels(tmp_path / "labels.json")) == {"hero", "villain"}


class TestAnalyze:
    def test_synergy_dominant(self, encryptor_corpus, tmp_path):
        args = ("analyze", encryptor_corpus / "hands.jsonl", "--labels", encryptor_corpus / "labels.json")
        assert run(*args, "--resamples", 0, "--out", tmp_path) == 0
        doc = json.loads((tmp_path / "report.json").read_text())
        shark = next(c for c in doc["cells"] if c["skill_class"] == "Shark")
        est = {e["measure"]: e["estimate"] for e in shark["estimates"] if e["state"] == ""}
        others = (est["redundancy"], est["unique_p1"], est["unique_w2"])
        assert est["synergy"] > max(others)

    def test_deterministic_bytes(self, encryptor_corpus, tmp_path):
        base = ("analyze", encryptor_corpus / "hands.jsonl", "--labels", encryptor_corpus / "labels.json", "--resamples", 30, "--seed", 9)
        assert run(*base, "--out", tmp_path / "a") == 0
        assert run(*base, "--out", tmp_path / "b") == 0
        for name in ("report.json", "report.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_preflop_variant_one_per_hand(self, encryptor_corpus, tmp_path):
        args = ("analyze", encryptor_corpus / "hands.jsonl", "--variant", "preflop", "--resamples", 0, "--out", tmp_path)
        assert run(*args, "--labels", encryptor_corpus / "labels.json") == 0
        doc = json.loads((tmp_path / "report.json").read_text())
        for cell in doc["cells"]:
            assert cell["n_observations"] == cell["n_hands"]
        assert sum(c["n_observations"] for c in doc["cells"]) == 1500

    def test_schema_mismatch(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text(json.dumps({"schema": "other", "version": 9}) + "\n")
        assert run("analyze", bad, "--out", tmp_path) == 1
        assert "error" in capsys.readouterr().err

    def test_report_embeds_config(self, encryptor_corpus, tmp_path):
        assert run("analyze", encryptor_corpus / "hands.jsonl", "--resamples", 0, "--levels", "50", "--out", tmp_path) == 0
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["version"] == __version__ and doc["config"]["levels"] == [50]
        csv = (tmp_path / "report.csv").read_text().splitlines()
        assert csv[0] == f"# pidpoker {__version__}" and csv[1].startswith("# config ")

    def test_env_defaults_and_flag_precedence(self, encryptor_corpus, tmp_path, monkeypatch):
        monkeypatch.setenv("PIDPOKER_RESAMPLES", "0")
        monkeypatch.setenv("PIDPOKER_VARIANT", "showdown")
        monkeypatch.setenv("PIDPOKER_OUT", str(tmp_path / "env"))
        assert run("analyze", encryptor_corpus / "hands.jsonl") == 0
        cfg = json.loads((tmp_path / "env" / "report.json").read_text())["config"]
        assert cfg["variant"] == "showdown" and cfg["resamples"] == 0
        assert run("analyze", encryptor_corpus / "hands.jsonl", "--variant", "main", "--out", tmp_path / "flag") == 0
        cfg = json.loads((tmp_path / "flag" / "report.json").read_text())["config"]
        assert cfg["variant"] == "main" and cfg["resamples"] == 0


class TestPipelined:
    def test_parse_then_analyze_equals_in_process(self, tmp_path):
        sim = tmp_path / "sim"
        assert run("simulate", "--hands", 400, "--seed", 3, "--out", sim) == 0
        assert run("parse", sim / "hands.txt", "--out", tmp_path / "parsed") == 0
        assert run("analyze", tmp_path / "parsed" / "hands.jsonl", "--labels", sim / "labels.json", "--resamples", 20, "--seed", 1, "--out", tmp_path / "rep") == 0

        records, _ = parse_stream((sim / "hands.txt").read_text())
        config = AnalysisConfig(variant=Variant.MAIN, resamples=20, seed=1)
        expected = run_analysis(records, config, labels=read_labels(sim / "labels.json")).to_json()
        assert (tmp_path / "rep" / "report.json").read_text() == expected


class TestReport:
    def test_summary(self, encryptor_corpus, tmp_path, capsys):
        assert run("analyze", encryptor_corpus / "hands.jsonl", "--resamples", 10, "--out", tmp_path) == 0
        capsys.readouterr()
        assert run("report", tmp_path / "report.json") == 0
        out = capsys.readouterr().out
        assert "level 50 Shark" in out and "synergy" in out

    def test_not_a_report(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("{}")
        assert run("report", p) == 1


def test_atomic_write_replaces(tmp_path):
    p = tmp_path / "d" / "f.txt"
    atomic_write(p, "one")
    atomic_write(p, "two")
    assert p.read_text() == "two" and [x.name for x in p.parent.iterdir()] == ["f.txt"]
