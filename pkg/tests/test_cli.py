import io
import subprocess
import sys

import pytest

from stab import derivation as D
from stab.atm import SAMPLES, format_atm
from stab.cli import main
from stab.corpus import encoding_programs, m_n, write_corpus

M2_TEXT = r"(\f. \z. f (f z)) (\x. if x then x else x) 0"


def cli(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    (tmp_path / "zero.lam").write_text("0\n")
    (tmp_path / "zero.json").write_text(D.dumps(D.bool_intro(0)))
    (tmp_path / "bad.lam").write_text("(\\x. x\n")
    (tmp_path / "open.lam").write_text("x 0\n")
    write_corpus([m_n(1), m_n(2)], tmp_path)
    for name, mk in SAMPLES.items():
        (tmp_path / f"{name}.atm").write_text(format_atm(mk()))
    return tmp_path


def test_parse(files, capsys):
    assert cli("parse", files / "zero.lam") == (0, "0\nsize 1\n")
    code, out = cli("parse", files / "m_02.lam")
    assert code == 0 and "size 11" in out
    code, _ = cli("parse", files / "bad.lam")
    assert code == 2
    assert "bad.lam:2:1" in capsys.readouterr().err


def test_check(files, capsys):
    code, out = cli("check", files / "m_02.lam", files / "m_02.json")
    assert code == 0 and "degree 1" in out and "rank 2" in out
    code, out = cli("check", files / "zero.lam", files / "zero.json")
    assert code == 0 and "degree 0" in out and "weight 1" in out
    code, _ = cli("check", files / "m_01.lam", files / "m_02.json")
    assert code == 2
    assert "differs" in capsys.readouterr().err


def test_run_big_trace(files):
    code, out = cli("run", files / "m_02.lam", "--trace")
    lines = out.splitlines()
    assert code == 0 and lines[-1] == "result 0"
    rules = [line.split(",")[0] for line in lines[1:-1]]
    assert rules[:5] == ["beta", "beta", "h", "beta", "if"]
    assert len(rules) == 25 and rules.count("Ax") == 4


def test_run_small_and_stats(files):
    code, out = cli("run", files / "m_02.lam", "--machine", "small", "--stats")
    assert code == 0 and "result 0" in out
    space_s = int(out.split("space_s ")[1].split()[0])
    code, out = cli("run", files / "m_02.lam", "--stats")
    assert space_s <= int(out.split("max_config_size ")[1].split()[0])


def test_run_with_derivation_checks_bounds(files):
    code, out = cli("run", files / "m_02.lam", "--derivation", files / "m_02.json")
    assert code == 0 and "space=pass" in out and "sizes=pass" in out


def test_run_tree(files):
    code, out = cli("run", files / "m_02.lam", "--tree")
    assert code == 0 and out.count("\n") == 26


def test_run_stuck(files, capsys):
    code, _ = cli("run", files / "open.lam")
    assert code == 3
    assert "unbound head variable x" in capsys.readouterr().err


def test_usage_errors(files):
    assert cli("run")[0] == 1
    assert cli("frobnicate")[0] == 1
    assert cli("run", files / "missing.lam")[0] == 1
    assert cli("run", files / "m_02.lam", "--machine", "medium")[0] == 1


def test_compile_atm(files, capsys):
    atm = files / "contains-one.atm"
    code, out = cli("compile-atm", atm, "--poly", "0,1", "--input", "001")
    assert code == 0 and "match (accept)" in out
    code, out = cli("compile-atm", atm, "--poly", "0,1", "--input", "000")
    assert code == 0 and "match (reject)" in out
    bad = files / "bad.atm"
    bad.write_text(atm.read_text().replace("state 1 A", "state 1 Q"))
    assert cli("compile-atm", bad, "--input", "0")[0] == 2
    assert "SpecError" in capsys.readouterr().err


def test_compile_atm_emits_a_checkable_program(files):
    code, _ = cli("compile-atm", files / "alternating.atm", "--input", "10", "--emit", files / "alt")
    assert code == 0
    code, out = cli("check", files / "alt.lam", files / "alt.json")
    assert code == 0


def test_bench_m_n(tmp_path):
    write_corpus([m_n(n) for n in range(1, 11)], tmp_path)
    code, out = cli("bench", tmp_path, "--format", "csv")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()]
    header, rows = rows[0], rows[1:]
    col = {c: i for i, c in enumerate(header)}
    assert [r[0] for r in rows] == [f"m_{n:02d}" for n in range(1, 11)]
    for n, r in enumerate(rows, 1):
        assert int(r[col["rules"]]) >= 2 ** n
        assert int(r[col["space"]]) <= 6 * (n + 9) ** 6
        assert r[col["ok"]] == "yes"


def test_bench_arithmetic_corpus_passes(tmp_path):
    write_corpus(encoding_programs(), tmp_path)
    code, out = cli("bench", tmp_path)
    assert code == 0
    assert all(line.split()[-2] == "yes" for line in out.splitlines()[1:])


def test_bench_empty_and_parallel_ordering(tmp_path):
    code, out = cli("bench", tmp_path, "--format", "csv")
    assert code == 0 and out.count("\n") == 1
    write_corpus([m_n(3), m_n(1)] + encoding_programs()[:6], tmp_path)
    serial = cli("bench", tmp_path, "--format", "csv")
    parallel = cli("bench", tmp_path, "--format", "csv", "--jobs", "3")
    assert serial == parallel


def test_bench_reports_bad_files(tmp_path, capsys):
    write_corpus([m_n(1)], tmp_path)
    (tmp_path / "broken.lam").write_text("x 0\n")
    code, out = cli("bench", tmp_path)
    assert code == 2 and "error" in out
    assert "broken" in capsys.readouterr().err


def test_console_script_runs(tmp_path):
    f = tmp_path / "m2.lam"
    f.write_text(M2_TEXT)
    proc = subprocess.run([sys.executable, "-m", "stab.cli", "parse", str(f)], capture_output=True, text=True)
    assert proc.returncode == 0 and "size 11" in proc.stdout
