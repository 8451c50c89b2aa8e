import subprocess
import sys
from pathlib import Path

import pytest

from golden_runs import GOLDEN
from ratmoore.cli import main

GOLDEN_DIR = Path(__file__).parent / "golden"


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_outputs(name, tmp_path, capsys):
    code, _ = run(GOLDEN[name] + ["--out", str(tmp_path)], capsys)
    assert code == 0
    for f in (GOLDEN_DIR / name).iterdir():
        assert (tmp_path / f.name).read_bytes() == f.read_bytes(), f.name


def test_report_embeds_config(capsys):
    code, out = run(["moore", "build", "--group", "f2", "--r", "3", "--seed", "7"], capsys)
    assert code == 0
    lines = out.out.splitlines()
    assert lines[0] == "ratmoore 0.1.0 moore build"
    assert "seed=7" in lines[1] and "radius=3" in lines[1]
    assert "caps bracket=2 radius=3" in out.out


def test_davis_interval(capsys):
    code, out = run(["davis", "build", "--example", "interval"], capsys)
    assert code == 0 and "betti_Q 1 1" in out.out


def test_davis_files(tmp_path, capsys):
    pkg = Path(__file__).parents[1] / "src" / "ratmoore" / "data" / "davis"
    code, out = run(["davis", "build", "--m", str(pkg / "disk_m.json"),
                     "--l", str(pkg / "c4_l.json")], capsys)
    assert code == 0 and "betti_Q 1 2 1" in out.out


def test_usage_errors(capsys):
    for argv in (["bogus"], ["moore", "build", "--bad"], ["moore", "build", "--group", "z3"],
                 ["truncate", "--radius", "3,2"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    code, _ = run(["davis", "build"], capsys)
    assert code == 2
    code, _ = run(["ring", "mul", "a"], capsys)
    assert code == 2


def test_malformed_files(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("garbage\n")
    code, _ = run(["complex", "check", str(bad)], capsys)
    assert code == 4
    code, _ = run(["davis", "build", "--m", str(bad), "--l", str(bad)], capsys)
    assert code == 4
    code, _ = run(["complex", "check", str(tmp_path / "missing.txt")], capsys)
    assert code == 4


def test_caps_exhausted(capsys):
    code, out = run(["moore", "build", "--group", "f2^2", "--r", "2", "--demo-twist",
                     "--bracket-cap", "1", "--radius", "1", "--radius-ceiling", "1"], capsys)
    assert code == 3
    assert "caps exhausted" in out.err


def test_invariant_failure(tmp_path, capsys):
    # a complex file whose boundaries do not compose to zero
    f = tmp_path / "c.txt"
    f.write_text("complex f1 kind Z degrees 0..2\nranks 0:1 1:1 2:1\n"
                 "boundary 1 1x1 1\n  0 0 1\nboundary 2 1x1 1\n  0 0 1\nend\n")
    code, out = run(["complex", "check", str(f)], capsys)
    assert code == 1 and "dd_zero False" in out.out


def test_other_commands(capsys):
    assert run(["ring", "mul", "a - 1", "A"], capsys)[1].out.endswith("result 1 - A\n")
    assert run(["lie", "dims", "--degrees", "1,2"], capsys)[0] == 0
    code, out = run(["lie", "sphere", "--r", "4"], capsys)
    assert "pi_7 (x) Q = Q^1" in out.out
    code, out = run(["l2", "chi-gap", "--b4", "0", "--chambers", "16"], capsys)
    assert "-32 (negative)" in out.out
    code, out = run(["homalg", "vanishing", "--d", "2", "--perturb"], capsys)
    assert "does not vanish" in out.out
    code, out = run(["homalg", "ext1", "--r", "3", "--d", "4", "--k", "5"], capsys)
    assert "boundary case" in out.out
    code, out = run(["truncate", "--target", "fox", "--radius", "1,2,3"], capsys)
    assert code == 0
    code, out = run(["complex", "classifying", "--group", "f2^2", "--dual"], capsys)
    assert code == 0 and "ranks 0:4 1:4 2:1" in out.out


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "ratmoore.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "0.1.0" in out.stdout
