import math

import pytest

from obsgap import cli, observability as ob


def run_in(tmp_path, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    return cli.run(argv)


class TestUsage:
    def test_no_subcommand(self, capsys):
        assert cli.run([]) == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        assert cli.run(["rfhe-sweep", "--frequency", "3"]) == 2

    def test_unknown_subcommand(self, capsys):
        assert cli.run(["melt"]) == 2

    def test_help_exits_zero(self, capsys):
        assert cli.run(["--help"]) == 0
        assert "subcommand" in capsys.readouterr().out

    def test_bad_float_list(self, capsys):
        assert cli.run(["rfhe-sweep", "--h-list", "0.2,fast"]) == 2


class TestDryRun:
    def test_prints_resolved_config_and_writes_nothing(
        self, tmp_path, monkeypatch, capsys
    ):
        code = run_in(tmp_path, monkeypatch, ["rfhe-sweep", "--dry-run"])
        assert code == 0
        out = capsys.readouterr().out
        assert "subcommand = rfhe-sweep" in out
        assert "h_list = 0.2,0.1,0.05,0.025" in out
        assert "epsilon = 0.5" in out
        assert "out = rfhe_sweep.csv" in out
        assert list(tmp_path.iterdir()) == []

    def test_every_subcommand_supports_it(self, tmp_path, monkeypatch, capsys):
        for name in (
            "rfhe-sweep",
            "kolmogorov-sweep",
            "eigen-table",
            "saddle-verify",
            "periodize-verify",
            "estimates-verify",
        ):
            assert run_in(tmp_path, monkeypatch, [name, "--dry-run"]) == 0
            assert f"subcommand = {name}" in capsys.readouterr().out


class TestConfigFile:
    def test_file_overrides_defaults_flags_override_file(
        self, tmp_path, monkeypatch, capsys
    ):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("epsilon = 0.7\nh-list = 0.3,0.15  # sweep\n")
        code = run_in(
            tmp_path,
            monkeypatch,
            ["rfhe-sweep", "--config", str(cfg), "--epsilon", "0.6", "--dry-run"],
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "epsilon = 0.6" in out
        assert "h_list = 0.3,0.15" in out

    def test_unknown_key_is_usage_error(self, tmp_path, monkeypatch, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("wavelength = 3\n")
        code = run_in(tmp_path, monkeypatch, ["rfhe-sweep", "--config", str(cfg)])
        assert code == 2
        assert "usage error" in capsys.readouterr().err

    def test_missing_file_is_usage_error(self, tmp_path, monkeypatch, capsys):
        code = run_in(
            tmp_path, monkeypatch, ["rfhe-sweep", "--config", str(tmp_path / "no.cfg")]
        )
        assert code == 2

    def test_malformed_line_is_usage_error(self, tmp_path, monkeypatch):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("epsilon 0.7\n")
        assert run_in(tmp_path, monkeypatch, ["rfhe-sweep", "--config", str(cfg)]) == 2


class TestSweepCommands:
    def test_rfhe_sweep_writes_csv_and_figure(self, tmp_path, monkeypatch, capsys):
        code = run_in(
            tmp_path, monkeypatch, ["rfhe-sweep", "--h-list", "0.2,0.1"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "wrote rfhe_sweep.csv (2 rows, equation rfhe_torus)" in out
        assert "slope log quotient vs 1/h = +" in out
        assert "slope log den vs 1/h = -" in out
        assert (tmp_path / "rfhe_sweep.csv").exists()
        assert (tmp_path / "rfhe_sweep.png").exists()
        rows = ob.load_csv(tmp_path / "rfhe_sweep.csv")
        assert [r["h"] for r in rows] == [0.2, 0.1]
        assert rows[0]["alpha"] == 0.5
        assert rows[0]["epsilon"] == 0.5

    def test_no_figure_skips_png(self, tmp_path, monkeypatch):
        code = run_in(
            tmp_path,
            monkeypatch,
            ["rfhe-sweep", "--h-list", "0.2,0.1", "--no-figure"],
        )
        assert code == 0
        assert not (tmp_path / "rfhe_sweep.png").exists()

    def test_output_is_byte_deterministic(self, tmp_path, monkeypatch):
        argv = ["rfhe-sweep", "--h-list", "0.2,0.1", "--no-figure", "--out"]
        assert run_in(tmp_path, monkeypatch, argv + ["a.csv"]) == 0
        assert run_in(tmp_path, monkeypatch, argv + ["b.csv"]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_kolmogorov_sweep(self, tmp_path, monkeypatch, capsys):
        code = run_in(
            tmp_path, monkeypatch, ["kolmogorov-sweep", "--h-list", "0.2,0.1"]
        )
        assert code == 0
        assert "equation kolm_line_v" in capsys.readouterr().out
        assert (tmp_path / "kolmogorov_sweep.csv").exists()

    def test_failed_row_partial_csv_exit_one(self, tmp_path, monkeypatch, capsys):
        code = run_in(
            tmp_path,
            monkeypatch,
            [
                "kolmogorov-sweep",
                "--omega-v",
                "interval",
                "--h-list",
                "0.6,0.2",
                "--no-figure",
            ],
        )
        assert code == 1
        captured = capsys.readouterr()
        assert "FAILED row h=0.6" in captured.err
        rows = ob.load_csv(tmp_path / "kolmogorov_sweep.csv")
        assert len(rows) == 1
        assert rows[0]["h"] == 0.2

    def test_unwritable_out_exits_one(self, tmp_path, monkeypatch, capsys):
        code = run_in(
            tmp_path,
            monkeypatch,
            ["rfhe-sweep", "--h-list", "0.2,0.1", "--out", "no_dir/x.csv"],
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_invalid_epsilon_exits_one(self, tmp_path, monkeypatch, capsys):
        code = run_in(
            tmp_path, monkeypatch, ["rfhe-sweep", "--epsilon", "4.0"]
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestVerifyCommands:
    def test_eigen_table(self, tmp_path, monkeypatch, capsys):
        code = run_in(tmp_path, monkeypatch, ["eigen-table", "--xi-re", "8,12"])
        assert code == 0
        out = capsys.readouterr().out
        assert "ratio=0.927558" in out
        assert "ratio=0.953796" in out
        csv = (tmp_path / "eigen_table.csv").read_text()
        assert csv.splitlines()[0] == (
            "xi_re,xi_im,rho_re,rho_im,asym_re,asym_im,ratio_abs,newton_tol"
        )
        assert len(csv.splitlines()) == 3
        assert (tmp_path / "eigen_table.png").exists()

    def test_saddle_verify_single_h(self, tmp_path, monkeypatch, capsys):
        code = run_in(
            tmp_path, monkeypatch, ["saddle-verify", "--h-list", "0.1"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "rel_err=4.5438" in out
        # one h cannot support an order fit or its figure
        assert "fitted order" not in out
        assert not (tmp_path / "saddle_verify.png").exists()
        lines = (tmp_path / "saddle_verify.csv").read_text().splitlines()
        assert lines[0] == "h,alpha,z_re,z_im,xi0,t,est_abs,oracle_abs,rel_err"
        assert len(lines) == 2

    def test_saddle_verify_order_fit(self, tmp_path, monkeypatch, capsys):
        code = run_in(
            tmp_path, monkeypatch, ["saddle-verify", "--h-list", "0.1,0.05"]
        )
        assert code == 0
        assert "fitted order" in capsys.readouterr().out
        assert (tmp_path / "saddle_verify.png").exists()

    def test_periodize_verify(self, tmp_path, monkeypatch, capsys):
        code = run_in(
            tmp_path, monkeypatch, ["periodize-verify", "--tol", "1e-8"]
        )
        assert code == 0
        assert "coefficient deviation" in capsys.readouterr().out
        lines = (tmp_path / "periodize_verify.csv").read_text().splitlines()
        assert lines[0] == "h,xi0,shells,deviation"
        dev = float(lines[1].split(",")[3])
        assert dev < 1e-8

    def test_estimates_verify(self, tmp_path, monkeypatch, capsys):
        code = run_in(tmp_path, monkeypatch, ["estimates-verify"])
        assert code == 0
        out = capsys.readouterr().out
        assert "slope log off-band sup vs 1/h = -" in out
        lines = (tmp_path / "estimates_verify.csv").read_text().splitlines()
        assert lines[0] == "h,alpha,z_re,z_im,xi0,epsilon,t,m_out,h_log_m_out,m_in"
        assert len(lines) == 4
        assert (tmp_path / "estimates_verify.png").exists()
