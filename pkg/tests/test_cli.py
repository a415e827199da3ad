import json
from pathlib import Path

import pytest

from hahndisk.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    return main(list(argv))


class TestBuild:
    def test_build_matches_golden(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert run("build", "--out", str(out)) == 0
        assert (out / "plan.json").read_bytes() == (GOLDEN / "plan.json").read_bytes()
        assert (out / "alpha.txt").read_bytes() == (GOLDEN / "alpha.txt").read_bytes()
        for i in (1, 2, 3):
            name = f"images/image_{i}.txt"
            assert (out / name).read_bytes() == (GOLDEN / name).read_bytes()

    def test_build_is_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("build", "--out", str(a)) == 0
        assert run("build", "--out", str(b)) == 0
        assert (a / "plan.json").read_bytes() == (b / "plan.json").read_bytes()
        assert (a / "alpha.txt").read_bytes() == (b / "alpha.txt").read_bytes()

    def test_invalid_gamma_is_usage_error(self, tmp_path):
        assert run("build", "--gamma-x", "1/3", "--out", str(tmp_path)) == 2

    def test_minimal_instance(self, tmp_path, capsys):
        assert run("build", "--stages", "1", "--out", str(tmp_path)) == 0
        doc = json.loads((tmp_path / "plan.json").read_text())
        assert len(doc["stages"]) == 1


class TestAdapted:
    def test_known_exponent(self, tmp_path, capsys):
        assert run("adapted", "0", "--out", str(tmp_path)) == 0
        doc = json.loads((tmp_path / "adapted_1.json").read_text())
        assert doc["m"] == 1 and doc["q"] == "0"
        assert run("verify", str(tmp_path / "adapted_1.json")) == 0

    def test_extension_exponent(self, tmp_path, capsys):
        assert run("adapted", "5/9", "--out", str(tmp_path)) == 0
        doc = json.loads((tmp_path / "adapted_13.json").read_text())
        assert doc["q"] == "5/9"
        assert len(doc["plan"]["stages"]) == 13
        assert run("verify", str(tmp_path / "adapted_13.json")) == 0

    def test_malformed_exponent(self, tmp_path):
        assert run("adapted", "zzz", "--out", str(tmp_path)) == 2
        assert run("adapted", "1/2", "--out", str(tmp_path)) == 2


class TestDivide:
    def test_zero_target(self, tmp_path, capsys):
        beta = tmp_path / "beta.txt"
        beta.write_text("O(EXACT)\n")
        assert run("divide", str(beta), "3", "--out", str(tmp_path)) == 0
        doc = json.loads((tmp_path / "trace.json").read_text())
        assert doc["final"]["val_lower"] == "EXACT"

    def test_round_trip_target(self, tmp_path, capsys):
        beta = tmp_path / "beta.txt"
        beta.write_text("1 t^10/9\nO(EXACT)\n")
        assert run("divide", str(beta), "6", "--out", str(tmp_path)) == 0
        assert run("verify", str(tmp_path / "trace.json")) == 0

    def test_auto_normalization_reported(self, tmp_path, capsys):
        beta = tmp_path / "beta.txt"
        beta.write_text("1 t^0 x1^1/3\nO(EXACT)\n")  # valuation 1/6 < 1/4
        assert run("divide", str(beta), "2", "--out", str(tmp_path)) == 0
        out = capsys.readouterr().out
        assert "normalized target by t^1" in out

    def test_missing_file(self, tmp_path):
        assert run("divide", str(tmp_path / "nope.txt"), "2") == 2


class TestClassify:
    @pytest.mark.parametrize("radius,expected", [
        ("1", "Type II"),
        ("1/2", "Type III"),
        ("EXACT", "Type I"),
    ])
    def test_single_radius(self, radius, expected, capsys):
        assert run("classify", radius) == 0
        assert capsys.readouterr().out.strip().endswith(expected)

    def test_vector(self, capsys):
        assert run("classify", "1", "2/3") == 0
        assert capsys.readouterr().out.strip().endswith("Type II")

    def test_bad_radius(self, capsys):
        assert run("classify", "frog") == 2


class TestVerifyCommand:
    def test_golden_passes(self):
        assert run("verify", str(GOLDEN / "plan.json")) == 0

    def test_corrupted_fails_with_location(self, tmp_path, capsys):
        doc = json.loads((GOLDEN / "plan.json").read_text())
        doc["stages"][4]["b"] -= 1
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        assert run("verify", str(bad)) == 1
        assert "stage 5" in capsys.readouterr().out

    def test_non_json_is_format_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("not json")
        assert run("verify", str(bad)) == 2

    def test_empty_file_is_format_error(self, tmp_path):
        bad = tmp_path / "empty.json"
        bad.write_text("")
        assert run("verify", str(bad)) == 2


class TestConfigHandling:
    def test_env_config(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"p": 3, "stages": 2}))
        monkeypatch.setenv("HAHNDISK_CONFIG", str(cfg))
        out = tmp_path / "out"
        assert run("build", "--out", str(out)) == 0
        doc = json.loads((out / "plan.json").read_text())
        assert doc["instance"]["stages"] == 2

    def test_flags_override_env(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"stages": 2}))
        monkeypatch.setenv("HAHNDISK_CONFIG", str(cfg))
        out = tmp_path / "out"
        assert run("build", "--stages", "3", "--out", str(out)) == 0
        doc = json.loads((out / "plan.json").read_text())
        assert doc["instance"]["stages"] == 3

    def test_usage_error_exit_code(self):
        assert run("no-such-command") == 2


def test_selftest(capsys):
    assert run("selftest") == 0
    assert "PASS: selftest" in capsys.readouterr().out
