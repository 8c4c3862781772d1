"""Harness behavior: config handling, CSV output, exit codes, reproducibility."""

import io
import math

import pytest

from uqcm.cli import (
    CSV_HEADER,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    SweepConfig,
    UsageError,
    build_sweep_config,
    compute_sweep,
    load_config_file,
    main,
    run_verify,
)


class TestConfig:
    def test_defaults(self):
        cfg = SweepConfig()
        assert cfg.mode == "exact"
        assert cfg.theta_steps == 19
        assert len(cfg.delta_list) == 4
        grid = cfg.theta_grid()
        assert grid[0] == pytest.approx(-math.pi / 2 + math.pi / 36)
        assert grid[-1] == pytest.approx(math.pi / 2)

    def test_validation(self):
        with pytest.raises(UsageError, match="mode"):
            SweepConfig(mode="bogus")
        with pytest.raises(UsageError, match="theta_steps"):
            SweepConfig(theta_steps=0)
        with pytest.raises(UsageError, match="theta value"):
            SweepConfig(theta_start=-2.0)
        with pytest.raises(UsageError, match="trials"):
            SweepConfig(trials=0)
        with pytest.raises(UsageError, match="delta_list"):
            SweepConfig(delta_list=())

    def test_config_file_parsing(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# comment line\n"
            "mode = montecarlo\n"
            "trials = 500\n"
            "delta_list = 0, 1.57\n"
            "theta_steps = 3\n"
        )
        values = load_config_file(str(path))
        assert values["mode"] == "montecarlo"
        assert values["trials"] == 500
        assert values["delta_list"] == (0.0, 1.57)
        assert values["theta_steps"] == 3

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("gain = 11\n")
        with pytest.raises(UsageError, match="unknown config key"):
            load_config_file(str(path))

    def test_missing_file_rejected(self):
        with pytest.raises(UsageError, match="cannot read"):
            load_config_file("/no/such/file.cfg")

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("mode = exact\nseed = 1\n")

        class Args:
            config = str(path)
            mode = "montecarlo"
            trials = None
            seed = None
            jitter_deg = None
            out = None

        cfg = build_sweep_config(Args())
        assert cfg.mode == "montecarlo"
        assert cfg.seed == 1


class TestSweep:
    def test_exact_rows_pinned_to_reference(self, tmp_path):
        cfg = SweepConfig(theta_steps=3, delta_list=(0.0,), out=str(tmp_path / "x.csv"))
        rows, summary, code = compute_sweep(cfg)
        assert code == EXIT_OK
        assert len(rows) == 6
        for row in rows:
            fields = row.split(",")
            assert fields[0] == "exact"
            assert fields[4] == "0.833333333"
            assert fields[5] == "0.000000000"
        assert any("PASS" in line for line in summary)

    def test_rows_sorted_by_delta_theta_replica(self):
        cfg = SweepConfig(theta_steps=2, delta_list=(1.0, 0.0))
        rows, _, _ = compute_sweep(cfg)
        keys = []
        for row in rows:
            f = row.split(",")
            keys.append((float(f[1]), float(f[2]), int(f[3])))
        assert keys == sorted(keys)

    def test_montecarlo_has_stderr_column(self):
        cfg = SweepConfig(mode="montecarlo", theta_steps=2, delta_list=(0.0,), trials=2000)
        rows, summary, code = compute_sweep(cfg)
        assert code == EXIT_OK
        assert all(float(r.split(",")[5]) > 0 for r in rows)

    def test_perturbed_summary_reports_bound(self):
        cfg = SweepConfig(mode="perturbed", theta_steps=1, delta_list=(0.0,), samples=5)
        rows, summary, code = compute_sweep(cfg)
        assert code == EXIT_OK
        assert len(rows) == 2
        assert any("0.005" in line for line in summary)
        assert any("analytic bound" in line for line in summary)

    def test_csv_byte_identical_across_runs(self, tmp_path):
        out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        code1 = main(["sweep", "--mode", "montecarlo", "--trials", "2000",
                      "--seed", "9", "--out", out1])
        code2 = main(["sweep", "--mode", "montecarlo", "--trials", "2000",
                      "--seed", "9", "--out", out2])
        assert code1 == code2 == EXIT_OK
        with open(out1, "rb") as f1, open(out2, "rb") as f2:
            assert f1.read() == f2.read()

    def test_csv_header_and_shape(self, tmp_path):
        out = str(tmp_path / "grid.csv")
        assert main(["sweep", "--out", out]) == EXIT_OK
        with open(out, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 19 * 4 * 2


class TestExitCodes:
    def test_usage_error_from_bad_flag_value(self, capsys):
        assert main(["sweep", "--mode", "bogus"]) == EXIT_USAGE
        capsys.readouterr()

    def test_usage_error_from_bad_config(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("trials = -5\n")
        assert main(["sweep", "--config", str(path)]) == EXIT_USAGE
        capsys.readouterr()

    def test_io_error_on_unwritable_output(self, capsys):
        assert main(["sweep", "--out", "/nonexistent-dir/x.csv"]) == EXIT_IO
        capsys.readouterr()

    def test_verify_passes_on_pristine_build(self, capsys):
        assert main(["verify"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("PASS") >= 6
        assert "FAIL" not in out

    def test_verify_fails_with_injected_misalignment(self, capsys):
        assert main(["verify", "--inject-hwp-offset-deg", "0.1"]) == EXIT_VERIFY
        out = capsys.readouterr().out
        assert "optics_equivalence\tFAIL" in out

    def test_distinct_exit_codes(self):
        assert len({EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO}) == 4


class TestVerify:
    def test_machine_readable_lines(self):
        buf = io.StringIO()
        code = run_verify(stdout=buf)
        assert code == EXIT_OK
        lines = buf.getvalue().splitlines()
        named = [ln for ln in lines if "\t" in ln]
        assert len(named) == 6
        for ln in named:
            name, status, dev, tol = ln.split("\t")
            assert status in ("PASS", "FAIL")
            assert dev.startswith("deviation=")
            assert tol.startswith("tol=")

    def test_tightened_solver_tolerance_still_passes(self):
        buf = io.StringIO()
        assert run_verify(prep_tol=1e-14, stdout=buf) == EXIT_OK
        assert "prep_solver\tPASS" in buf.getvalue()


class TestTomo:
    def test_exact_output(self, capsys):
        assert main(["tomo", "--theta", "0.0", "--delta", "0.0"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "replica 1: F = 0.833333333" in out
        assert "replica 2: F = 0.833333333" in out

    def test_montecarlo_output(self, capsys):
        assert main(["tomo", "--mode", "montecarlo", "--trials", "5000", "--seed", "4"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "+/-" in out
