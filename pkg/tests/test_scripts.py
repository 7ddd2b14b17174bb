import runpy
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def _run(name, argv, monkeypatch):
    monkeypatch.setattr(sys, "argv", [name, *argv])
    with pytest.raises(SystemExit) as e:
        runpy.run_path(str(SCRIPTS / name), run_name="__main__")
    return e.value.code


def test_reproduce_examples(monkeypatch, capsys):
    assert _run("reproduce_examples.py", [], monkeypatch) == 0
    out = capsys.readouterr().out
    assert "prefix bbba, rest ba" in out
    assert "{'to': '⊥⊤⊤⊤'}" in out
    assert "boundaries [(1, 1), (3, 4), (4, 5)]" in out


def test_random_experiment(monkeypatch, capsys):
    assert _run("run_random_experiment.py", ["--counts", "5,10", "--length", "20"], monkeypatch) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("profile,traces,events")
    assert [ln.split(",")[1] for ln in lines[1:]] == ["5", "10"]


def test_periodic_experiment(monkeypatch, capsys):
    assert _run("run_periodic_experiment.py", ["--counts", "4", "--lengths", "20"], monkeypatch) == 0
    row = capsys.readouterr().out.strip().splitlines()[1].split(",")
    assert row[0] == "periodic" and row[6] == "6" and row[7] == "clean"
