import csv
import io
import json
import subprocess
import sys

import pytest

from suffixmatch.cli import main
from suffixmatch.datagen import DIGITS, write_database_file
from suffixmatch.protocol import load


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "salt").write_text("cli-secret\n")
    return tmp_path


def run(*args):
    return main([str(a) for a in args])


def write_db(path, rows):
    path.write_text(write_database_file(DIGITS, rows))


def test_worked_pair_encode_then_match(workdir):
    write_db(workdir / "a.csv", [("a1", "83321")])
    write_db(workdir / "b.csv", [("b1", "33327")])
    for side in "ab":
        assert run("encode", "--input", f"{side}.csv", "--salt-file", "salt", "--min-len", 3, "--out", f"{side}.bin") == 0
    assert run("match", "--a", "a.bin", "--b", "b.bin", "--out", "m.csv") == 0
    rows = list(csv.DictReader(open(workdir / "m.csv")))
    assert len(rows) == 1
    assert rows[0]["lcs_length"] == "3" and rows[0]["sim"] == "0.600000"
    text = (workdir / "m.csv").read_text() + (workdir / "a.bin").read_bytes().hex()
    assert "83321" not in (workdir / "m.csv").read_text()
    assert "cli-secret" not in text


def test_mismatched_headers_exit_2(workdir, capsys):
    write_db(workdir / "a.csv", [("a1", "83321")])
    assert run("encode", "--input", "a.csv", "--salt-file", "salt", "--min-len", 3, "--first-char", "--first-char-k", 2,
               "--out", "a.bin") == 0
    assert run("encode", "--input", "a.csv", "--salt-file", "salt", "--min-len", 3, "--first-char", "--first-char-k", 3,
               "--out", "b.bin") == 0
    assert run("match", "--a", "a.bin", "--b", "b.bin", "--out", "m.csv") == 2
    assert "k: 2 != 3" in capsys.readouterr().err
    assert not (workdir / "m.csv").exists()


def test_malformed_input_exit_3(workdir):
    (workdir / "junk.bin").write_bytes(b"nope")
    assert run("match", "--a", "junk.bin", "--b", "junk.bin", "--out", "m.csv") == 3
    (workdir / "bad.csv").write_text("no header\n")
    assert run("encode", "--input", "bad.csv", "--salt-file", "salt", "--out", "x.bin") == 3
    assert run("encode", "--input", "missing.csv", "--salt-file", "salt", "--out", "x.bin") == 3


def test_usage_errors_exit_1(workdir):
    assert run("match", "--a", "x") == 1
    assert run("frobnicate") == 1
    write_db(workdir / "a.csv", [("a1", "83321")])
    assert run("encode", "--input", "a.csv", "--out", "a.bin") == 1
    assert run("encode", "--input", "a.csv", "--salt-file", "salt", "--first-char", "--modulus", 5, "--out", "a.bin") == 1
    assert run("gen", "--max-edits", 0, "--out", "p.csv") == 1


def test_salt_from_environment(workdir, monkeypatch):
    monkeypatch.setenv("SM_SALT", "cli-secret")
    write_db(workdir / "a.csv", [("a1", "83321")])
    assert run("encode", "--input", "a.csv", "--salt-env", "SM_SALT", "--out", "env.bin") == 0
    assert run("encode", "--input", "a.csv", "--salt-file", "salt", "--out", "file.bin") == 0
    assert (workdir / "env.bin").read_bytes() == (workdir / "file.bin").read_bytes()
    assert run("encode", "--input", "a.csv", "--salt-env", "SM_UNSET", "--out", "x.bin") == 1


def test_bad_records_reported_and_abort(workdir, capsys):
    (workdir / "a.csv").write_text('# alphabet: "0123456789"\nrecord_id,value\nr1,123\nr2,12x\n')
    assert run("encode", "--input", "a.csv", "--salt-file", "salt", "--out", "a.bin") == 0
    assert "r2" in capsys.readouterr().err
    assert [r for r, _ in load(workdir / "a.bin").records] == ["r1"]
    assert run("encode", "--input", "a.csv", "--salt-file", "salt", "--abort-on-error", "--out", "b.bin") == 3


def test_gen_is_deterministic(workdir):
    assert run("gen", "--count", 50, "--seed", 4, "--out", "p1.csv") == 0
    assert run("gen", "--count", 50, "--seed", 4, "--out", "p2.csv") == 0
    assert (workdir / "p1.csv").read_bytes() == (workdir / "p2.csv").read_bytes()
    assert run("gen", "--alphabet", "letters", "--min-length", 4, "--max-length", 12, "--max-edits", 4,
               "--count", 20, "--out", "l.csv") == 0


def test_pipeline_reproducible_and_worker_independent(workdir):
    run("gen", "--count", 30, "--seed", 1, "--out", "p.csv", "--db-a", "a.csv", "--db-b", "b.csv")
    for side in "ab":
        run("encode", "--input", f"{side}.csv", "--salt-file", "salt", "--out", f"{side}.bin")
    run("encode", "--input", "p.csv", "--column", "s1", "--salt-file", "salt", "--out", "a2.bin")
    assert (workdir / "a.bin").read_bytes() == (workdir / "a2.bin").read_bytes()
    assert run("match", "--a", "a.bin", "--b", "b.bin", "--out", "m1.csv") == 0
    assert run("match", "--a", "a.bin", "--b", "b.bin", "--workers", 2, "--out", "m2.csv") == 0
    assert (workdir / "m1.csv").read_bytes() == (workdir / "m2.csv").read_bytes()


def test_config_file_sets_defaults(workdir):
    write_db(workdir / "a.csv", [("a1", "83321")])
    (workdir / "cfg.json").write_text(json.dumps({"min_len": 3, "salt_file": "salt"}))
    assert run("--config", "cfg.json", "encode", "--input", "a.csv", "--out", "a.bin") == 0
    assert load(workdir / "a.bin").header.m == 3
    (workdir / "bad.json").write_text("[1, 2]")
    assert run("--config", "bad.json", "encode", "--input", "a.csv", "--out", "a.bin") == 3


def test_eval_subcommands(workdir, capsys):
    run("gen", "--count", 40, "--seed", 2, "--out", "p.csv")
    for method in ("suffix_basic", "suffix_firstchar", "bloom", "tabhash"):
        assert run("eval-scatter", "--pairs", "p.csv", "--method", method, "--out", f"{method}.csv") == 0
    rows = list(csv.DictReader(io.StringIO((workdir / "suffix_firstchar.csv").read_text().split("\n", 1)[1])))
    assert len(rows) == 40 and all(r["plain_sim"] == r["encoded_sim"] for r in rows)
    run("gen", "--benford", "--count", 500, "--length", 8, "--seed", 1, "--out", "ben.csv")
    assert run("eval-freq", "--input", "ben.csv", "--k-values", "2,3", "--out", "f.csv") == 0
    summary = json.loads(capsys.readouterr().out)
    assert set(summary["encoded_chi2"]) == {"2", "3"}
    assert run("bench", "--pairs", "p.csv", "--methods", "bloom,tabhash", "--out", "b.csv") == 0


def test_attack_subcommand(workdir):
    run("gen", "--benford", "--count", 1000, "--length", 8, "--seed", 1, "--out", "ben.csv")
    run("gen", "--benford", "--count", 1000, "--length", 8, "--seed", 2, "--out", "ref.csv")
    run("encode", "--input", "ben.csv", "--salt-file", "salt", "--out", "ben.bin")
    assert run("attack", "--encoded", "ben.bin", "--reference", "ref.csv", "--truth", "ben.csv", "--out", "r.json") == 0
    report = json.loads((workdir / "r.json").read_text())
    assert report["top1_hit"] and report["accuracy"] > 0.5


def test_module_entry_point(workdir):
    proc = subprocess.run([sys.executable, "-m", "suffixmatch", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "encode" in proc.stdout


def test_flags_validated_before_reading_input(workdir):
    # the input does not exist: a flag error must win over the I/O error
    assert run("encode", "--input", "missing.csv", "--salt-file", "salt", "--min-len", 0, "--out", "x.bin") == 1
    assert run("encode", "--input", "missing.csv", "--salt-file", "salt", "--first-char", "--first-char-k", 3,
               "--out", "x.bin") == 1
    assert run("match", "--a", "missing", "--b", "missing", "--threshold", 2, "--out", "m.csv") == 1
    assert run("encode", "--input", "missing.csv", "--salt-file", "salt", "--hash", "nohash", "--out", "x.bin") == 1
