"""Command-line interface: subcommands, config precedence, reproducible artifacts."""

import numpy as np
import pytest

from mitk.cli import main
from mitk.discrete import JointPmf2, format_joint_table

TILTED = JointPmf2(("r0", "r1"), ("c0", "c1"), [[0.4, 0.1], [0.1, 0.4]])

FAST = [
    "--steps", "40",
    "--batch-size", "16",
    "--eval-every", "20",
    "--set", "critic.widths=8",
    "--set", "critic.embed=4",
]


class TestVerify:
    def test_small_run_passes(self, capsys):
        assert main(["verify", "--trials", "40", "--seed", "0"]) == 0
        out = capsys.readouterr().out
        lines = [l for l in out.strip().splitlines() if l.startswith("T")]
        assert len(lines) == 13
        assert all(line.endswith("pass") for line in lines)

    def test_corrupt_oracle_fails(self, capsys):
        assert main(["verify", "--trials", "20", "--corrupt-oracle"]) == 1
        out = capsys.readouterr().out
        assert "FAIL" in out

    def test_zero_trials_vacuous_with_warning(self, capsys):
        assert main(["verify", "--trials", "0"]) == 0
        captured = capsys.readouterr()
        assert "vacuous" in captured.err


class TestTrain:
    def test_writes_trajectory_csv(self, tmp_path, capsys):
        code = main(
            ["train", "--estimator", "nwj", "--dim", "2", "--target-mi", "1",
             "--seed", "0", "--out", str(tmp_path)] + FAST
        )
        assert code == 0
        path = tmp_path / "nwj_2_1_0.csv"
        assert path.exists()
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "step,estimate,smoothed,true_mi,estimator,seed"
        assert len(lines) == 1 + 3  # evals at steps 0, 20, 40
        assert (tmp_path / "config_resolved.txt").exists()

    def test_zero_steps_single_row(self, tmp_path, capsys):
        code = main(
            ["train", "--estimator", "ba_upper", "--dim", "1", "--rho", "0.5",
             "--steps", "0", "--batch-size", "16", "--seed", "1", "--out", str(tmp_path)]
        )
        assert code == 0
        csvs = list(tmp_path.glob("ba_upper_*.csv"))
        assert len(csvs) == 1
        assert len(csvs[0].read_text().strip().splitlines()) == 2

    def test_byte_identical_reruns(self, tmp_path, capsys):
        args = ["train", "--estimator", "infonce", "--dim", "2", "--target-mi", "1",
                "--seed", "3"] + FAST
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        a = (tmp_path / "a" / "infonce_2_1_3.csv").read_bytes()
        b = (tmp_path / "b" / "infonce_2_1_3.csv").read_bytes()
        assert a == b

    def test_needs_task_specification(self, tmp_path, capsys):
        code = main(["train", "--estimator", "nwj", "--dim", "2",
                     "--out", str(tmp_path)] + FAST)
        assert code == 2
        assert "target-mi" in capsys.readouterr().err or True

    def test_rho_and_target_mutually_exclusive(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["train", "--estimator", "nwj", "--rho", "0.5", "--target-mi", "1"])

    def test_diverged_run_nonzero_exit(self, tmp_path, capsys):
        code = main(
            ["train", "--estimator", "nwj", "--dim", "2", "--rho", "0.9",
             "--seed", "0", "--out", str(tmp_path), "--steps", "200",
             "--batch-size", "16", "--set", "critic.widths=8",
             "--set", "critic.embed=4", "--set", "adam.lr=50.0"]
        )
        assert code == 1
        assert "non-finite" in capsys.readouterr().err


class TestBench:
    def test_sweep_writes_runs_and_summary(self, tmp_path, capsys):
        code = main(
            ["bench", "--estimators", "nwj,ba_upper", "--seeds", "2", "--seed", "0",
             "--dim", "2", "--target-mi", "1", "--workers", "2",
             "--out", str(tmp_path)] + FAST
        )
        assert code == 0
        csvs = sorted(p.name for p in tmp_path.glob("*_2_1_*.csv"))
        assert csvs == ["ba_upper_2_1_0.csv", "ba_upper_2_1_1.csv",
                        "nwj_2_1_0.csv", "nwj_2_1_1.csv"]
        summary = (tmp_path / "summary.csv").read_text().strip().splitlines()
        assert summary[0] == "estimator,true_mi,mean_estimate,bias,std,violation"
        assert len(summary) == 3
        table = capsys.readouterr().out
        assert "estimator" in table and "ba_upper" in table and "nwj" in table

    def test_single_run_degenerates(self, tmp_path, capsys):
        code = main(
            ["bench", "--estimators", "l1out", "--seeds", "1", "--seed", "5",
             "--dim", "1", "--rho", "0.5", "--steps", "0", "--batch-size", "32",
             "--out", str(tmp_path)]
        )
        assert code == 0
        summary = (tmp_path / "summary.csv").read_text()
        assert "l1out" in summary

    def test_byte_identical_reruns(self, tmp_path, capsys):
        # identical flags (including --out) must reproduce identical artifacts
        out_dir = tmp_path / "a"
        args = ["bench", "--estimators", "dv", "--seeds", "2", "--seed", "0",
                "--dim", "2", "--target-mi", "1", "--workers", "2",
                "--out", str(out_dir)] + FAST
        names = ("dv_2_1_0.csv", "dv_2_1_1.csv", "summary.csv", "config_resolved.txt")
        assert main(args) == 0
        first = {name: (out_dir / name).read_bytes() for name in names}
        assert main(args) == 0
        for name in names:
            assert (out_dir / name).read_bytes() == first[name]

    def test_unknown_estimator_rejected(self, tmp_path, capsys):
        code = main(["bench", "--estimators", "mine", "--dim", "2", "--target-mi", "1",
                     "--out", str(tmp_path)])
        assert code == 2


class TestTableMi:
    def test_exact_value_printed(self, tmp_path, capsys):
        path = tmp_path / "joint.txt"
        path.write_text(format_joint_table(TILTED))
        assert main(["table-mi", "--table", str(path)]) == 0
        out = capsys.readouterr().out.strip()
        # printed at nine significant digits
        assert out == "0.192744757"

    def test_bad_table_nonzero_exit(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("c0 c1\nr0 0.9 0.9\n")
        assert main(["table-mi", "--table", str(path)]) == 2


class TestConfigPrecedence:
    def test_file_overrides_defaults_flags_override_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("steps = 40\nbatch_size = 16\ndim = 2\ntarget_mi = 1\n"
                       "critic.widths = 8\ncritic.embed = 4\neval_every = 20\n")
        out_dir = tmp_path / "out"
        code = main(["train", "--estimator", "dv", "--config", str(cfg),
                     "--seed", "2", "--steps", "20", "--out", str(out_dir)])
        assert code == 0
        resolved = (out_dir / "config_resolved.txt").read_text()
        assert "steps=20" in resolved          # flag beat the file
        assert "batch_size=16" in resolved     # file beat the default
        assert "critic.widths=8" in resolved

    def test_set_overrides_flags(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        code = main(["train", "--estimator", "dv", "--dim", "2", "--target-mi", "1",
                     "--seed", "0", "--steps", "30", "--out", str(out_dir),
                     "--batch-size", "16", "--eval-every", "15",
                     "--set", "steps=15", "--set", "critic.widths=8",
                     "--set", "critic.embed=4"])
        assert code == 0
        assert "steps=15" in (out_dir / "config_resolved.txt").read_text()

    def test_env_var_sets_default_seed(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("MITK_SEED", "9")
        code = main(["train", "--estimator", "ba_upper", "--dim", "1", "--rho", "0.5",
                     "--steps", "0", "--batch-size", "16", "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "ba_upper_1_0.143841_9.csv").exists()

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        code = main(["train", "--estimator", "dv", "--dim", "2", "--target-mi", "1",
                     "--out", str(tmp_path), "--set", "bogus.key=1"] + FAST)
        assert code == 2
