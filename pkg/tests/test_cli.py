import subprocess
import sys
from importlib import resources

import pytest

from droles.cli import main

CORPUS = resources.files("droles").joinpath("corpus")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err.strip()


@pytest.mark.parametrize("role, expr, want", [
    ("rep", "HTML", "String"),
    ("nom", "T @nom Int", "T @nom Int"),
    ("nom", "F @nom Int", "Maybe @rep Int"),
    ("rep", "T @nom Int", "Maybe @rep Int"),
])
def test_eval(capsys, role, expr, want):
    assert run(capsys, "eval", "--role", role, "-e", expr)[:2] == (0, want)


@pytest.mark.parametrize("role, a, b, want, code", [
    ("rep", "T @nom Int", "Maybe @rep Int", "equal", 0),
    ("nom", "T @nom Int", "F @nom Int", "not-equal", 1),
    ("rep", "Set @nom HTML", "Set @nom String", "not-equal", 1),
    ("nom", "F @nom Int", "Maybe @rep Int", "equal", 0),
    ("rep", "Maybe @rep HTML", "Maybe @rep String", "equal", 0),
])
def test_equal(capsys, role, a, b, want, code):
    assert run(capsys, "equal", "--role", role, a, b)[:2] == (code, want)


@pytest.mark.parametrize("expr, want, code", [
    ("Maybe", "[rep]", 0),
    ("Set", "[nom]", 0),
    ("\\+(x:Type) -> x", "not a constant-headed path", 1),
])
def test_roles(capsys, expr, want, code):
    assert run(capsys, "roles", expr)[:2] == (code, want)


def test_check(capsys):
    code, out, _ = run(capsys, "check", str(CORPUS / "prelude.dr"))
    assert code == 0 and out.splitlines()[-1] == "T: ok"
    code, out, _ = run(capsys, "check", str(CORPUS / "discern_bad.dr"))
    assert code == 1 and "D: RoleError" in out and "at x" in out
    code, out, _ = run(capsys, "check", str(CORPUS / "duplicate.dr"))
    assert code == 1 and "DuplicateName" in out


def test_trace_names_rules_and_replays(capsys):
    code, out, _ = run(capsys, "eval", "--role", "rep", "--trace", "-e", "T @nom Int")
    lines = out.splitlines()
    assert code == 0 and lines == ["ABeta-Axiom\tF @nom Int", "ABeta-Axiom\tMaybe @rep Int", "Maybe @rep Int"]


def test_trace_replay_property(capsys):
    f = str(CORPUS / "mixed.dr")
    code, out, _ = run(capsys, "eval", "-f", f, "--trace", "-e", "Elem @nom (F @nom Bool)")
    lines = out.splitlines()
    assert code == 0 and len(lines) > 3
    start = "Elem @nom (F @nom Bool)"
    for line in lines[:-1]:
        c, replay, _ = run(capsys, "eval", "-f", f, "--trace", "--fuel", "1", "-e", start)
        assert replay.splitlines()[0] == line
        start = line.split("\t", 1)[1]


def test_fuel_exhaustion_is_unknown(capsys, tmp_path):
    src = tmp_path / "loop.dr"
    src.write_text("const Int : Type @ []\ntypefam Loop : Type @ [] where Loop = Loop\n")
    code, out, err = run(capsys, "eval", "-f", str(src), "--fuel", "20", "-e", "Loop")
    assert code == 2 and "unknown (fuel)" in err
    code, out, err = run(capsys, "equal", "-f", str(src), "--fuel", "20", "Loop", "Int")
    assert code == 2 and "unknown (fuel)" in (out + err)


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys, "eval")[0] == 64
    assert run(capsys, "eval", "-e", "(Int")[0] == 65
    bad = tmp_path / "bad.dr"
    bad.write_text("const X : Type\nconst Y : (Type")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 65 and "2:16" in err
    assert run(capsys, "eval", "-e", "Set @rep Int")[0] == 1
    assert run(capsys, "equal", "Int", "Maybe")[0] == 1
    assert run(capsys, "check", str(tmp_path / "missing.dr"))[0] == 64


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "droles.cli", "roles", "Maybe"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "[rep]"
