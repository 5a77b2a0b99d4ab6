"""Command line front end: commands, exit codes, config handling."""

import json
from pathlib import Path

from combspec.cli import main

FIXTURE = Path(__file__).parent / "fixtures" / "oeis_stripped.txt"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_wfomc_prints_count(capsys):
    code, out = run(capsys, "wfomc", "(V x ~R(x,x))", "--n", "3")
    assert code == 0
    assert out.strip() == "64"


def test_wfomc_weights(capsys):
    code, out = run(capsys, "wfomc", "(E x Heads(x))", "--n", "2", "--w", "Heads=4")
    assert code == 0
    assert out.strip() == "24"


def test_spectrum_plain_output(capsys):
    code, out = run(capsys, "spectrum", "(V x E=1 y R(x,y))", "--length", "5")
    assert code == 0
    assert [int(t) for t in out.split()] == [1, 4, 27, 256, 3125]


def test_spectrum_json_output(capsys):
    code, out = run(capsys, "spectrum", "(E x U(x))", "--length", "4", "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["terms"] == ["1", "3", "7", "15"]
    assert doc["truncated"] is False


def test_parse_error_exit_code(capsys):
    code, _ = run(capsys, "spectrum", "(V x R(x,)", "--length", "3")
    assert code == 2


def test_fragment_error_exit_code(capsys):
    code, _ = run(capsys, "spectrum", "(V x E=2 y R(x,y))", "--length", "3")
    assert code == 3


def test_budget_exit_code_with_partial_output(capsys):
    code, out = run(
        capsys,
        "spectrum",
        "(V x E y R(x,y))",
        "--length",
        "10",
        "--budget-secs",
        "0",
    )
    assert code == 4
    assert len(out.split()) < 10


def test_io_error_exit_code(capsys):
    code, _ = run(capsys, "db", "stats", "--db", "/nonexistent/dir/db.jsonl")
    assert code == 5


def test_generate_populates_db(tmp_path, capsys):
    db = tmp_path / "seq.jsonl"
    code, out = run(
        capsys,
        "generate",
        "--profile",
        "fo2-paper",
        "--layers",
        "1",
        "--db",
        str(db),
        "--json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["layers"][0] == {"layer": 1, "kept": 4, "unique": 4}
    assert doc["db"]["total"] == 4
    assert db.exists()


def test_generate_flags_without_profile(tmp_path, capsys):
    code, out = run(
        capsys,
        "generate",
        "--ml",
        "1",
        "--mc",
        "1",
        "--up",
        "1",
        "--bp",
        "1",
        "--k",
        "1",
        "--layers",
        "1",
        "--json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["layers"][0]["kept"] == 7


def test_db_stats_and_export(tmp_path, capsys):
    db = tmp_path / "seq.jsonl"
    run(capsys, "generate", "--profile", "fo2-paper", "--layers", "1", "--db", str(db))
    code, out = run(capsys, "db", "stats", "--db", str(db))
    assert code == 0
    assert json.loads(out)["total"] == 4
    code, out = run(capsys, "db", "export", "--db", str(db), "--status", "unique")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert len(rows) == 4
    assert all(r["status"] == "unique" for r in rows)


def test_oeis_terms_against_fixture(capsys):
    code, out = run(
        capsys,
        "oeis",
        "--terms",
        "1,2,6,24,120,720",
        "--stripped",
        str(FIXTURE),
    )
    assert code == 0
    assert out.strip() == "A000142"


def test_oeis_db_annotates_matches(tmp_path, capsys):
    from combspec.seqdb import SpectrumDB

    db_path = tmp_path / "seq.jsonl"
    db = SpectrumDB(db_path)
    db.insert("(E x U(x))", [1, 3, 7, 15, 31, 63])
    code, out = run(
        capsys,
        "oeis",
        "--db",
        str(db_path),
        "--stripped",
        str(FIXTURE),
        "--json",
    )
    assert code == 0
    rows = json.loads(out)
    assert rows == [{"sentence": "(E x U(x))", "matches": []}]


def test_config_file_supplies_defaults(tmp_path, capsys):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("ml = 1\nmc = 1\nup = 1\nbp = 1\nk = 0\nlayers = 1\n")
    code, out = run(capsys, "generate", "--config", str(cfg), "--json")
    assert code == 0
    assert json.loads(out)["layers"][0]["kept"] == 4


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("ml = 1\nmc = 1\nup = 1\nbp = 1\nk = 0\nlayers = 1\n")
    code, out = run(capsys, "generate", "--config", str(cfg), "--k", "1", "--json")
    assert code == 0
    assert json.loads(out)["layers"][0]["kept"] == 7


def test_unknown_command_exits_nonzero(capsys):
    try:
        main(["frobnicate"])
    except SystemExit as e:
        assert e.code != 0
    else:
        raise AssertionError("argparse should reject unknown commands")
