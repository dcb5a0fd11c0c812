import json
from fractions import Fraction as F

import pytest
from click.testing import CliRunner

from twistchar.cli import main
from twistchar.folded import folded_data
from twistchar.qseries import MultiSeries
from twistchar.quasiparticle import principal_char_enum


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, ["--help"] if not args else list(args),
                             env={"TWISTCHAR_CACHE": str(tmp_path / "cache")})

    return invoke


def test_char_principal_json(run):
    res = run("char", "principal", "--type", "A3^2", "--level", "1", "--trunc", "1/2",
              "--format", "json")
    assert res.exit_code == 0
    s = MultiSeries.from_json(res.output)
    assert s.terms() == {(0, (0, 0)): 1, (F(1, 2), (1, 0)): 1, (F(1, 2), (1, 1)): 1}
    assert s == principal_char_enum(folded_data("A3^2"), 1, F(1, 2))


def test_unknown_type_exit_2(run):
    res = run("char", "parafermionic", "--type", "X9^9", "--level", "2", "--trunc", "1")
    assert res.exit_code == 2
    assert "Usage" in res.output


@pytest.mark.parametrize("bad", ["0.5", "-1", "1/0", "abc"])
def test_bad_truncation_exit_2(run, bad):
    res = run("char", "principal", "--type", "A3^2", "--trunc", bad)
    assert res.exit_code == 2


def test_bad_level_exit_2(run):
    assert run("char", "principal", "--type", "A3^2", "--level", "0").exit_code == 2


def test_fold(run):
    res = run("fold", "--type", "D4^3", "--format", "json")
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert data["gram0"] == [["2/3", "-1/1"], ["-1/1", "2/1"]]
    assert data["rho"] == ["1/3", "1/1"] and data["h_dims"] == [2, 1, 1]
    pretty = run("fold", "--type", "A3^2")
    assert pretty.exit_code == 0 and "gram0:" in pretty.output and "h_dims" in pretty.output


def test_verify_exit_0(run):
    res = run("verify", "--type", "A3^2", "--level", "2", "--trunc", "3")
    assert res.exit_code == 0, res.output
    lines = [l for l in res.output.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert len(lines) == 3 and all(l.startswith("PASS") for l in lines)
    assert "translate_sign: 1" in res.output


def test_verify_json(run):
    res = run("verify", "--type", "D4^3", "--level", "1", "--trunc", "1", "--format", "json")
    assert res.exit_code == 0
    rep = json.loads(res.output)
    assert {r["status"] for r in rep["results"]} == {"PASS"}
    for r in rep["results"]:
        assert set(r) == {"comparison", "type", "level", "truncation", "status"}


def test_char_kinds_agree(run):
    def get(kind, level):
        res = run("char", kind, "--type", "D3^2", "--level", str(level), "--trunc", "2",
                  "--format", "json")
        assert res.exit_code == 0, res.output
        return MultiSeries.from_json(res.output)

    assert get("principal", 2) == get("principal-formula", 2)
    assert get("parafermionic", 2) == get("parafermionic-formula", 2)
    assert get("module", 1) == get("oracle", 1) == get("level1", 1)


def test_level1_requires_level_1(run):
    res = run("char", "level1", "--type", "A3^2", "--level", "2")
    assert res.exit_code == 2


def test_byte_identical_runs(run, tmp_path):
    args = ("char", "oracle", "--type", "A3^2", "--level", "2", "--trunc", "2", "--format", "csv")
    cold = run(*args).output
    warm = run(*args).output
    nocache = run(*args, "--no-cache").output
    other = run(*args, "--cache-dir", str(tmp_path / "other")).output
    assert cold == warm == nocache == other
    assert (tmp_path / "other").exists()


def test_export(run, tmp_path):
    out = tmp_path / "s.json"
    res = run("export", "module", "--type", "A3^2", "--level", "2", "--trunc", "1",
              "--format", "json", "--out", str(out))
    assert res.exit_code == 0
    s = MultiSeries.from_json(out.read_text())
    assert s.coefficient(0) == 1
    assert run("export", "module", "--type", "A3^2").exit_code == 2


def test_cache_commands(run, tmp_path):
    d = str(tmp_path / "c2")
    run("char", "oracle", "--type", "A3^2", "--level", "1", "--trunc", "1", "--cache-dir", d)
    stat = json.loads(run("cache", "stat", "--cache-dir", d).output)
    assert stat["entries"] == 1
    assert run("cache", "clear", "--cache-dir", d).output.strip() == "removed 1 entries"
    assert json.loads(run("cache", "stat", "--cache-dir", d).output)["entries"] == 0


def test_non_chain_type_is_usage_error(run):
    res = run("char", "principal", "--type", "untwisted:D4", "--trunc", "1")
    assert res.exit_code == 2


def test_pretty_output(run):
    res = run("char", "level1", "--type", "A3^2", "--trunc", "1/2")
    assert res.exit_code == 0
    assert res.output.startswith("1 + ") and "O(q^" in res.output
