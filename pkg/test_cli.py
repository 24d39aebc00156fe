import pytest

from conftest import FIXTURES
from core.config import Settings
from core.formats import CSV_HEADER, parse_certificate_text, parse_family_csv
from main import UsageError, cli_main, parse_range


def _run(capsys, *argv):
    code = cli_main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_range():
    assert list(parse_range("1..3")) == [1, 2, 3]
    for bad in ("3..1", "1-3", "a..b"):
        with pytest.raises(UsageError):
            parse_range(bad)


def test_validate(capsys):
    code, out, _ = _run(capsys, "validate", FIXTURES / "g0m7.ttk")
    assert code == 0
    assert "surface S_0,7" in out
    assert "maximal yes" in out


def test_usage_errors_exit_with_one(capsys):
    assert _run(capsys, "frobnicate")[0] == 1
    assert _run(capsys, "validate")[0] == 1
    code, _, err = _run(capsys, "validate", FIXTURES / "missing.ttk")
    assert code == 1
    assert "ERROR" in err


def test_pa_prints_certificate(capsys):
    code, out, _ = _run(capsys, "pa", FIXTURES / "g1m2_phi.seq", "--tol", "1/10^9")
    assert code == 0
    assert out.startswith("cert v1")
    record = parse_certificate_text(out)
    assert record.p == 6
    assert record.alpha_lo > 1


def test_pa_on_reducible_loop_exits_with_two(capsys):
    code, _, err = _run(capsys, "pa", FIXTURES / "bad_loop.seq")
    assert code == 2
    assert "сертификация не удалась" in err


def test_matrix_and_tight(capsys):
    code, out, _ = _run(capsys, "matrix", FIXTURES / "g1m2_phi.seq")
    assert code == 0
    assert len(out.splitlines()) == 6

    code, out, _ = _run(capsys, "tight", FIXTURES / "g1m2_loop.seq")
    assert code == 0
    assert "tight yes" in out
    assert "min_weight_bound" in out


def test_run_prints_end_track(capsys):
    code, out, _ = _run(capsys, "run", FIXTURES / "g1m2_phi.seq")
    assert code == 0
    assert out.startswith("ttk 1\nsurface 1 2\nbranches 6\n")


def test_twist(capsys):
    code, out, _ = _run(capsys, "twist", FIXTURES / "g1m2.ttk", FIXTURES / "g1m2.curves", "a1")
    assert code == 0
    assert out.splitlines() == ["seq g1m2.ttk", "split 1 R", "iso 3 2 1 4 5 6"]

    assert _run(capsys, "twist", FIXTURES / "g1m2.ttk", FIXTURES / "g1m2.curves", "a9")[0] == 1


def test_roof(capsys):
    code, out, _ = _run(capsys, "roof", FIXTURES / "g1m2_phi.seq", FIXTURES / "g1m2.measure")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split() == ["i", "move", "ratio", "t(i)"]
    assert len(lines) == 2 + 6


def test_systole(capsys):
    code, out, _ = _run(capsys, "systole", FIXTURES / "g1m2_phi.seq",
                        "--curves", FIXTURES / "g1m2.curves", "--grid", "8", "--tol", "1/10^9")
    assert code == 0
    assert sum(line.startswith("curve ") for line in out.splitlines()) == 3
    assert "sup_min [" in out


def test_family_writes_csv(capsys, tmp_path):
    target = tmp_path / "twist.csv"
    code, out, _ = _run(capsys, "family", "twist", "--range", "0..1", "--out", target,
                        "--grid", "4", "--tol", "1/10^9")
    assert code == 0
    text = target.read_text(encoding="utf-8")
    assert text.splitlines()[0] == CSV_HEADER
    assert [row["param"] for row in parse_family_csv(text)] == [0, 1]
    assert "2 строк" in out


def test_trace_summary(capsys):
    code, out, _ = _run(capsys, "--trace", "validate", FIXTURES / "g1m2.ttk")
    assert code == 0
    assert "VALIDATE COMPLETED" in out
    assert "Total Steps: 1" in out


def test_validate_reports_chirality(capsys):
    code, out, _ = _run(capsys, "validate", FIXTURES / "g1m2.ttk")
    assert code == 0
    assert "amphichiral yes" in out or "amphichiral no" in out


def test_bad_family_parameter_exits_with_one(capsys):
    code, _, err = _run(capsys, "family", "zeta", "--range", "0..0")
    assert code == 1
    assert "k должно быть положительным" in err


def test_sample_is_driven_by_seed(capsys):
    argv = ("--seed", "5", "sample", "roof", FIXTURES / "g1m2.ttk", "--count", "8", "--length", "10")
    code, first, _ = _run(capsys, *argv)
    assert code == 0
    assert "violations 0" in first
    assert _run(capsys, *argv)[1] == first


def test_sample_weight_on_tight_sequence(capsys):
    code, out, _ = _run(capsys, "sample", "weight", FIXTURES / "g1m2_loop.seq", "--count", "30")
    assert code == 0
    assert "below beta 0" in out


def test_seed_default_comes_from_environment(monkeypatch):
    monkeypatch.setenv("TTK_SEED", "17")
    assert Settings.from_env().seed == 17
