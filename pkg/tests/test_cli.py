import csv
import io
import math
import subprocess
import sys

import pytest

from worstcase import analytic as an
from worstcase.cli import (
    EXIT_COMPARISON,
    EXIT_OK,
    EXIT_USAGE,
    HEADER,
    SweepRow,
    SweepSpec,
    UsageError,
    main,
    parse_gamma_range,
    render_csv,
)


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def _rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    assert reader.fieldnames == HEADER
    return list(reader)


class TestSweepSpec:
    def test_grid(self):
        s = SweepSpec(-10, 20, 1, ("worst",))
        g = s.gammas_db()
        assert len(g) == 31 and g[0] == -10 and g[-1] == 20

    def test_fractional_step(self):
        assert SweepSpec(0, 1, 0.1, ("worst",)).gammas_db()[-1] == 1.0

    @pytest.mark.parametrize("args", [(0, 1, 0, ("worst",)), (2, 1, 1, ("worst",)), (0, 1, 1, ()),
                                      (0, 1, 1, ("best",))])
    def test_invalid(self, args):
        with pytest.raises(UsageError):
            SweepSpec(*args)

    def test_parse_range(self):
        assert parse_gamma_range("-2") == (-2.0, -2.0, 1.0)
        assert parse_gamma_range("-10:20:0.5") == (-10.0, 20.0, 0.5)
        with pytest.raises(UsageError):
            parse_gamma_range("1:2")


def test_csv_round_trip():
    vals = [0.1 + 0.2, 1 / 3, 2.0 ** -40, math.pi * 1e-17]
    rows = [SweepRow(-2.0, "worst", analytic=v, mc_mean=v / 7, mc_stderr=v / 11, n=10) for v in vals]
    back = _rows(render_csv(rows))
    for row, v in zip(back, vals):
        assert float(row["analytic"]) == v
        assert float(row["mc_mean"]) == v / 7 and float(row["mc_stderr"]) == v / 11
    assert back[0]["pass"] == ""


class TestAnalytic:
    def test_ratio_minus_2db(self, capsys):
        code, out = _run(capsys, "analytic", "--gamma-db", "-2", "--metrics", "worst,typical")
        assert code == EXIT_OK
        rows = _rows(out)
        assert [r["metric"] for r in rows] == ["worst", "typical"]
        ratio = float(rows[0]["analytic"]) / float(rows[1]["analytic"])
        assert 0.23 <= ratio <= 0.25

    def test_values_exact(self, capsys):
        _, out = _run(capsys, "analytic", "--gamma-db", "-1", "--metrics", "worst-cs,typical")
        cs, typ = (float(r["analytic"]) for r in _rows(out))
        assert cs == an.coverage_cs(an.db_to_linear(-1.0))
        assert typ == an.coverage_typical_il(an.db_to_linear(-1.0))
        assert abs(cs - typ) < 0.02

    def test_start_equals_stop(self, capsys):
        _, out = _run(capsys, "analytic", "--gamma-db", "3:3:1", "--metrics", "worst,worst-cs,typical")
        assert len(_rows(out)) == 3

    def test_spectral_rows(self, capsys):
        _, out = _run(capsys, "analytic", "--gamma-db", "0", "--metrics", "spectral-worst,spectral-cs")
        rows = _rows(out)
        assert [r["gamma_db"] for r in rows] == ["", ""]
        assert float(rows[0]["analytic"]) == pytest.approx(0.39, abs=0.005)

    def test_no_formula_is_usage_error(self, capsys):
        code, out = _run(capsys, "analytic", "--sigma2", "0.1", "--metrics", "typical")
        assert code == EXIT_USAGE and out == ""

    def test_noise_worst_has_formula(self, capsys):
        code, out = _run(capsys, "analytic", "--sigma2", "0.5", "--gamma-db", "0", "--metrics", "worst")
        assert code == EXIT_OK
        assert float(_rows(out)[0]["analytic"]) == pytest.approx(0.0719299580198863, rel=1e-8)

    @pytest.mark.parametrize("argv", [["analytic", "--gamma-db", "5:1:1"], ["analytic", "--gamma-db", "0:1:-1"],
                                      ["analytic", "--metrics", "nope"], ["analytic", "--alpha", "2"],
                                      ["bogus"], ["analytic", "--lambda", "abc"]])
    def test_usage_errors(self, capsys, argv):
        assert _run(capsys, *argv)[0] == EXIT_USAGE

    def test_out_file(self, capsys, tmp_path):
        f = tmp_path / "a.csv"
        code, out = _run(capsys, "analytic", "--gamma-db", "0", "--out", str(f))
        assert code == EXIT_OK and out == ""
        assert len(_rows(f.read_text())) == 3


class TestConfig:
    def test_file_then_flags(self, capsys, tmp_path, monkeypatch):
        cfg = tmp_path / "wc.conf"
        cfg.write_text("# comment\ngamma-db = -2\nmetrics = worst\nalpha = 3\n")
        monkeypatch.setenv("WORSTCASE_CONFIG", str(cfg))
        _, out = _run(capsys, "analytic")
        rows = _rows(out)
        assert len(rows) == 1
        assert float(rows[0]["analytic"]) == an.coverage_worst_general(an.NetworkParams(alpha=3.0),
                                                                       an.db_to_linear(-2.0))
        _, out = _run(capsys, "analytic", "--alpha", "4")
        assert float(_rows(out)[0]["analytic"]) == pytest.approx(an.coverage_worst_il(an.db_to_linear(-2.0)))

    def test_explicit_config_flag(self, capsys, tmp_path):
        cfg = tmp_path / "x.conf"
        cfg.write_text("metrics = typical\n")
        _, out = _run(capsys, "analytic", "--config", str(cfg), "--gamma-db", "0")
        assert [r["metric"] for r in _rows(out)] == ["typical"]

    def test_bad_config(self, capsys, tmp_path):
        cfg = tmp_path / "bad.conf"
        cfg.write_text("colour = blue\n")
        assert _run(capsys, "analytic", "--config", str(cfg))[0] == EXIT_USAGE
        assert _run(capsys, "analytic", "--config", str(tmp_path / "missing.conf"))[0] == EXIT_USAGE


class TestSimulate:
    ARGS = ("--gamma-db", "-2:2:2", "--realizations", "20", "--metrics", "worst,worst-cs,spectral-worst")

    def test_seed_byte_identical(self, capsys):
        _, a = _run(capsys, "simulate", "--seed", "42", *self.ARGS)
        _, b = _run(capsys, "simulate", "--seed", "42", *self.ARGS)
        assert a == b
        _, c = _run(capsys, "simulate", "--seed", "43", *self.ARGS)
        assert a != c

    def test_jobs_byte_identical(self, capsys):
        _, a = _run(capsys, "simulate", "--seed", "42", *self.ARGS)
        _, b = _run(capsys, "simulate", "--seed", "42", "--jobs", "2", *self.ARGS)
        assert a == b

    def test_metadata(self, capsys):
        _, out = _run(capsys, "simulate", *self.ARGS)
        meta = [ln for ln in out.splitlines() if ln.startswith("#")]
        keys = {ln[2:].split("=")[0] for ln in meta}
        assert {"seed", "realizations", "window_radius", "guard", "truncation_bias_bound"} <= keys
        rows = _rows(out)
        assert all(r["analytic"] == "" and r["mc_mean"] and r["n"] for r in rows)

    def test_quick(self, capsys):
        _, out = _run(capsys, "simulate", "--quick", "--realizations", "50", "--gamma-db", "0", "--metrics", "worst")
        assert "# realizations=5" in out

    def test_stderr_scaling(self, capsys):
        base = ("simulate", "--gamma-db", "-2", "--metrics", "worst")
        _, a = _run(capsys, *base, "--realizations", "60")
        _, b = _run(capsys, *base, "--realizations", "120")
        ratio = float(_rows(b)[0]["mc_stderr"]) / float(_rows(a)[0]["mc_stderr"])
        assert ratio == pytest.approx(1 / math.sqrt(2), rel=0.2)

    def test_minus_2db_near_hand_value(self, capsys):
        _, out = _run(capsys, "simulate", "--gamma-db", "-2", "--metrics", "worst", "--realizations", "100")
        row = _rows(out)[0]
        assert abs(float(row["mc_mean"]) - 0.16) <= 3 * float(row["mc_stderr"])


class TestCompare:
    def test_typical_only_passes(self, capsys):
        code, out = _run(capsys, "compare", "--metrics", "typical", "--gamma-db", "-10:20:5")
        assert code == EXIT_OK
        assert all(r["pass"] == "PASS" for r in _rows(out))

    def test_spectral_rows(self, capsys):
        _, out = _run(capsys, "compare", "--metrics", "spectral-worst,spectral-cs", "--realizations", "30")
        rows = _rows(out)
        assert [r["metric"] for r in rows] == ["spectral-worst", "spectral-cs"]
        assert float(rows[0]["analytic"]) == an.spectral_worst().bps

    def test_no_oracle(self, capsys):
        code, out = _run(capsys, "compare", "--sigma2", "0.1", "--metrics", "worst,typical", "--gamma-db", "0",
                         "--realizations", "20")
        assert code == EXIT_OK
        assert [r["pass"] for r in _rows(out)] == ["PASS", "NO-ORACLE"]

    def test_fail_exit_status(self, capsys):
        # a tiny window with no far-field term biases SIR upward well beyond 3 sigma
        code, out = _run(capsys, "compare", "--metrics", "worst", "--gamma-db", "0", "--realizations", "2000",
                         "--window-radius", "3", "--guard", "1.5", "--far-field", "none")
        assert code == EXIT_COMPARISON
        assert _rows(out)[0]["pass"] == "FAIL"


def test_negative_gamma_without_equals(capsys):
    code, out = _run(capsys, "analytic", "--gamma-db", "-10:-8:1", "--metrics", "worst")
    assert code == EXIT_OK and len(_rows(out)) == 3


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "worstcase.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "compare" in res.stdout
