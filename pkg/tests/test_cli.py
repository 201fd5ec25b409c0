import io
import json
from pathlib import Path

import pytest

from polyenc import cli, config
from polyenc.cli import EXIT_INPUT, EXIT_INTERNAL, EXIT_OK, main


def corpus_path(name: str) -> str:
    return str(Path(config.CORPUS_DIR) / name)


def test_encode_to_stdout(capsys):
    assert main(["encode", corpus_path("lists.p"), "--scheme", "g_qq"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "fof(ax_guard_fun_hd" in out
    assert "tff(" not in out


def test_encode_writes_files(tmp_path):
    out, sidecar = tmp_path / "out.p", tmp_path / "prov.json"
    code = main([
        "encode", corpus_path("lists.p"), "--scheme", "t_qq", "--mono",
        "-o", str(out), "--emit-provenance", str(sidecar),
    ])
    assert code == EXIT_OK
    assert "fof(" in out.read_text()
    provenance = json.loads(sidecar.read_text())
    assert provenance


def test_encode_reads_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(Path(corpus_path("monkey_village.p")).read_text()))
    assert main(["encode", "--scheme", "t"]) == EXIT_OK
    assert "fof(" in capsys.readouterr().out


def test_analyze(capsys):
    assert main(["analyze", corpus_path("lists.p")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "U: list(A)" in out
    assert "hd: cover [" in out


def test_monomorphise(capsys):
    assert main(["monomorphise", corpus_path("lists.p"), "--mono-budget", "1", "--report-dropped"]) == EXIT_OK
    captured = capsys.readouterr()
    assert "tff(" in captured.out
    assert "dropped: exhaust" in captured.err


def test_check(capsys):
    assert main(["check", corpus_path("monkey_village.p"), "--expect", "sat:3"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("pass: model of size 3")


def test_check_encoded(capsys):
    code = main(["check", corpus_path("unit_card.p"), "--scheme", "e", "--expect", "unsat", "--steps", "2000"])
    assert code == EXIT_OK
    assert capsys.readouterr().out.startswith("pass:")


def test_stats(capsys):
    assert main(["stats", corpus_path("monkey_village.p")]) == EXIT_OK
    assert "clauses: 4" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["encode", "corpus/lists.p"],
        ["encode", "corpus/lists.p", "--scheme", "nope"],
        ["encode", "corpus/lists.p", "--scheme", "a", "--mono"],
        ["check", "corpus/lists.p"],
        ["check", "corpus/lists.p", "--expect", "maybe"],
        ["stats", "corpus/lists.p", "--bogus-flag"],
        ["frobnicate"],
    ],
)
def test_bad_options(argv, monkeypatch):
    monkeypatch.chdir(config.BASE_DIR)
    assert main(argv) == EXIT_INPUT


def test_missing_file(tmp_path):
    assert main(["stats", str(tmp_path / "missing.p")]) == EXIT_INPUT


def test_syntax_error(tmp_path):
    bad = tmp_path / "bad.p"
    bad.write_text("fof(a, axiom, p(.")
    assert main(["stats", str(bad)]) == EXIT_INPUT


def test_unsupported_input(tmp_path):
    bad = tmp_path / "arith.p"
    bad.write_text("tff(a, axiom, $less(1, 2)).")
    assert main(["stats", str(bad)]) == EXIT_INPUT


def test_internal_error(monkeypatch):
    def boom(cfg):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli.COMMANDS, "stats", boom)
    assert main(["stats", corpus_path("monkey_village.p")]) == EXIT_INTERNAL


def test_help_exits_cleanly():
    assert main(["--help"]) == EXIT_OK
