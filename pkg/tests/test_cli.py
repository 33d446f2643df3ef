import subprocess
import sys

import numpy as np
import pytest

from zakharov_trig.cli import main
from zakharov_trig.harness import read_table


def run_cli(args):
    return main(list(args))


class TestHelp:
    def test_help_exits_zero(self, capsys):
        assert run_cli(["--help"]) == 0
        out = capsys.readouterr().out
        for sub in ("run", "converge", "soliton", "conserve", "selftest"):
            assert sub in out

    def test_subcommand_help_lists_flags_with_defaults(self, capsys):
        assert run_cli(["run", "--help"]) == 0
        out = capsys.readouterr().out
        for flag in ("--scheme", "--K", "--L", "--tau", "--CFL", "--out-dir",
                     "--dealias", "--sample-every", "--config"):
            assert flag in out
        assert "default" in out

    def test_unknown_flag_exits_one(self, capsys):
        assert run_cli(["run", "--bogus"]) == 1
        assert "usage" in capsys.readouterr().err


class TestRunCommand:
    def test_zero_T_single_row(self, tmp_path):
        code = run_cli(["run", "--T", "0", "--tau", "0.01", "--K", "128",
                        "--out-dir", str(tmp_path)])
        assert code == 0
        params, header, cols = read_table(tmp_path / "run_soliton_first.csv")
        assert cols["t"].size == 1

    def test_tau_and_cfl_exclusive(self, tmp_path, capsys):
        code = run_cli(["run", "--T", "1", "--tau", "0.01", "--CFL", "5",
                        "--K", "128", "--out-dir", str(tmp_path)])
        assert code == 1
        assert "exactly one" in capsys.readouterr().err

    def test_missing_step_size(self, tmp_path):
        assert run_cli(["run", "--T", "1", "--K", "128",
                        "--out-dir", str(tmp_path)]) == 1

    def test_env_var_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ZAK_OUT_DIR", str(tmp_path / "envout"))
        assert run_cli(["run", "--T", "0", "--tau", "0.01", "--K", "128"]) == 0
        assert (tmp_path / "envout" / "run_soliton_first.csv").exists()


class TestConfigFile:
    def test_config_with_flag_override(self, tmp_path):
        cfg = tmp_path / "job.cfg"
        cfg.write_text(
            "problem=soliton\nscheme=second\nK=128\ntau=0.01\nT=0.1\n"
            f"out_dir={tmp_path}\n"
        )
        assert run_cli(["run", "--config", str(cfg)]) == 0
        assert (tmp_path / "run_soliton_second.csv").exists()
        # flag overrides the file value
        assert run_cli(["run", "--config", str(cfg), "--scheme", "first"]) == 0
        assert (tmp_path / "run_soliton_first.csv").exists()

    def test_bad_config_key_exits_one(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("bogus=1\n")
        assert run_cli(["run", "--config", str(cfg), "--tau", "0.01",
                        "--T", "0", "--K", "128"]) == 1

    def test_identical_config_identical_bytes(self, tmp_path):
        cfg = tmp_path / "job.cfg"
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        cfg.write_text("problem=soliton\nscheme=first\nK=128\ntau=0.01\nT=0.2\n")
        assert run_cli(["run", "--config", str(cfg), "--out-dir", str(out1)]) == 0
        assert run_cli(["run", "--config", str(cfg), "--out-dir", str(out2)]) == 0
        a = (out1 / "run_soliton_first.csv").read_bytes()
        b = (out2 / "run_soliton_first.csv").read_bytes()
        assert a == b


class TestConvergeCommand:
    def test_soliton_smoke(self, tmp_path, capsys):
        code = run_cli([
            "converge", "--problem", "soliton", "--scheme", "both",
            "--K", "128", "--T", "0.1",
            "--taus", "0.02", "0.01", "0.005", "0.0025",
            "--out-dir", str(tmp_path),
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "slope" in out
        for scheme in ("first", "second"):
            params, header, cols = read_table(
                tmp_path / f"converge_soliton_{scheme}.csv"
            )
            assert cols["tau"].size == 4
            assert np.all(cols["err_composite"] >= 0)


class TestSolitonCommand:
    def test_snapshots_written(self, tmp_path):
        code = run_cli([
            "soliton", "--times", "0", "0.2", "--T", "0.2", "--tau", "0.01",
            "--K", "128", "--out-dir", str(tmp_path),
        ])
        assert code == 0
        for t in ("0", "0.2"):
            params, header, cols = read_table(tmp_path / f"soliton_first_t{t}.csv")
            assert "abs_E" in cols


class TestConserveCommand:
    def test_default_cfl_five(self, tmp_path):
        code = run_cli(["conserve", "--T", "2", "--K", "512",
                        "--out-dir", str(tmp_path)])
        assert code == 0
        params, _, cols = read_table(tmp_path / "conserve_soliton_first.csv")
        assert float(params["CFL_requested"]) == 5.0
        assert cols["dev_H"].size > 5


class TestDivergenceExit:
    def test_custom_problem_divergence_exits_two(self, tmp_path, capsys):
        # hand-built snapshot with absurd amplitudes must trip the divergence
        # detector and exit 2
        from zakharov_trig import Field, TorusGrid, init_state, snapshot_export

        g = TorusGrid(2 * np.pi, 64)
        huge = Field.from_physical(g, np.full(64, 1e160))
        zero = Field.zeros(g)
        state = init_state(huge, zero, zero, "first", 0.1)
        snap = tmp_path / "bad_init.csv"
        snapshot_export(state, snap)
        code = run_cli(["run", "--problem", "custom", "--init", str(snap),
                        "--tau", "0.1", "--T", "1", "--out-dir", str(tmp_path)])
        assert code == 2
        assert "divergence" in capsys.readouterr().err

    def test_custom_round_trip(self, tmp_path):
        from zakharov_trig import SolitonParams, TorusGrid, init_state, \
            snapshot_export, soliton_exact

        g = TorusGrid(20 * np.pi, 128)
        state = init_state(*soliton_exact(SolitonParams(), g, 0.0), "first", 0.01)
        snap = tmp_path / "init.csv"
        snapshot_export(state, snap)
        code = run_cli(["run", "--problem", "custom", "--init", str(snap),
                        "--tau", "0.01", "--T", "0.1", "--out-dir", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "run_custom_first.csv").exists()


def test_module_invocation():
    out = subprocess.run(
        [sys.executable, "-m", "zakharov_trig", "--help"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert "zaktrig" in out.stdout
