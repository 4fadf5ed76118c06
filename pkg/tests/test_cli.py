"""Tests for CLI integration."""

import pandas as pd
import pytest

from rhgverify import config as config_module
from rhgverify.catalog import entry_names
from rhgverify.cli import create_parser
from rhgverify.main import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main
from rhgverify.renderers.machine import exit_code_for, parse_records

from test_helpers import run_cli


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep the user-level config file inside the test directory."""
    path = tmp_path / "config" / "config.toml"
    monkeypatch.setattr(config_module, "get_config_path", lambda: str(path))
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "xdg"))
    return path


def machine(capsys, argv):
    """Run ``main`` with machine output and return (status, records)."""
    status = main(argv + ["--format", "machine"])
    return status, parse_records(capsys.readouterr().out)


class TestCLIIntegration:
    """Integration tests for the installed command."""

    def test_cli_help(self):
        """Test that --help flag works."""
        result = run_cli(["--help"])
        assert result.returncode == 0
        assert "Verify Z-measurement patterns" in result.stdout
        assert "Examples:" in result.stdout

    def test_cli_version(self):
        """Test that --version flag works."""
        result = run_cli(["--version"])
        assert result.returncode == 0
        assert "rhgverify" in result.stdout

    def test_lattice_info(self):
        """Test the cell counts of the smallest lattice."""
        result = run_cli(["lattice", "info", "--shape", "2", "2", "2"])
        assert result.returncode == 0
        assert "m0=8 m1=12 m2=6 m3=1" in result.stdout
        assert "12 x 6" in result.stdout

    def test_verify_catalog_and_corruption(self):
        """Test an accepted circuit and its negative control."""
        accepted = run_cli(["verify", "--catalog", "cnot"])
        assert accepted.returncode == 0
        assert "4/4 targets accepted" in accepted.stdout
        rejected = run_cli(["verify", "--catalog", "cnot", "--corrupt", "1"])
        assert rejected.returncode == 1
        assert "[REJECTED]" in rejected.stdout

    def test_missing_file(self, tmp_path):
        """Test that an unreadable circuit file is an input error."""
        result = run_cli(["verify", str(tmp_path / "missing.rhg")])
        assert result.returncode == 2
        assert "cannot read circuit file" in result.stderr

    def test_bad_arguments(self):
        """Test that argparse errors exit with the input status."""
        assert run_cli(["overhead", "T"]).returncode == 2
        assert run_cli(["frobnicate"]).returncode == 2


class TestParser:
    """Tests for the argument parser."""

    def test_common_flags_follow_subcommand(self):
        """Test that shared flags are accepted after the subcommand."""
        args = create_parser().parse_args(["verify", "--catalog", "identity", "-d", "--format", "machine"])
        assert args.debug is True
        assert args.format == "machine"
        assert args.catalog == "identity"

    def test_gate_names(self):
        """Test that gate names are case-insensitive and validated."""
        args = create_parser().parse_args(["overhead", "s_magic", "--omega", "1e6", "--optimize"])
        assert args.gate == "S_MAGIC"
        with pytest.raises(SystemExit):
            create_parser().parse_args(["overhead", "toffoli", "--omega", "1e6"])

    def test_verify_source_is_exclusive(self):
        """Test that a file and a catalog entry cannot both be given."""
        with pytest.raises(SystemExit):
            create_parser().parse_args(["verify", "a.rhg", "--catalog", "cnot"])


class TestLatticeAndVerify:
    """In-process tests of the lattice and verify commands."""

    def test_lattice_machine(self, capsys):
        """Test the lattice record."""
        status, records = machine(capsys, ["lattice", "info", "--shape", "3", "3", "3"])
        assert status == EXIT_OK
        assert records[0]["record"] == "lattice"
        assert (records[0]["m0"], records[0]["m3"]) == ("27", "8")

    def test_invalid_shape(self, capsys):
        """Test that a zero side length is an input error."""
        assert main(["lattice", "info", "--shape", "0", "2", "2"]) == EXIT_INPUT

    def test_verify_file_with_witness(self, capsys, tmp_path):
        """Test verifying an exported circuit file."""
        path = tmp_path / "identity.rhg"
        assert main(["catalog", "export", "identity", "--out", str(path)]) == EXIT_OK
        capsys.readouterr()
        assert main(["verify", str(path), "--witness"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "witness:" in out
        assert "targets accepted" in out

    def test_verify_machine_replay(self, capsys):
        """Test that the exit status can be recovered from machine output."""
        status, records = machine(capsys, ["verify", "--catalog", "cnot", "--corrupt", "2"])
        assert status == EXIT_FAILED
        assert exit_code_for(records) == EXIT_FAILED
        targets = [r for r in records if r["record"] == "target"]
        assert any(r["verdict"] == "rejected" for r in targets)
        assert all(int(r["aug_rank"]) - int(r["rank"]) in (0, 1) for r in targets)

        status, records = machine(capsys, ["verify", "--catalog", "cnot"])
        assert status == exit_code_for(records) == EXIT_OK

    def test_corrupt_out_of_range(self, capsys):
        """Test the corruption hook's range check."""
        assert main(["verify", "--catalog", "identity", "--corrupt", "100000"]) == EXIT_INPUT

    def test_syntax_error(self, caplog, tmp_path):
        """Test that a malformed circuit file reports its line."""
        path = tmp_path / "bad.rhg"
        path.write_text("SHAPE 2 2 2\nSECTION PRIMAL_Z\n1 0 0 2 0\n", encoding="utf-8")
        assert main(["verify", str(path)]) == EXIT_INPUT
        assert "line 3" in caplog.text


class TestCatalog:
    """In-process tests of the catalog command."""

    def test_list(self, capsys):
        """Test that every entry is listed in order."""
        status, records = machine(capsys, ["catalog", "list"])
        assert status == EXIT_OK
        assert [r["name"] for r in records] == entry_names()

    def test_export_to_stdout(self, capsys):
        """Test the circuit text of an entry."""
        assert main(["catalog", "export", "cnot"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("SHAPE ")
        assert "NAME cnot" in out

    def test_unknown_entry(self, capsys):
        """Test an unknown catalog name."""
        assert main(["catalog", "export", "nonexistent"]) == EXIT_INPUT


class TestOverhead:
    """In-process tests of the overhead command."""

    def test_optimized_s(self, capsys):
        """Test an optimized topological S gate."""
        status, records = machine(capsys, ["overhead", "S", "--omega", "1e8", "--optimize"])
        assert status == EXIT_OK
        record = records[0]
        assert record["gate"] == "S"
        assert record["feasible"] == "true"
        assert record["l_max"] == "0"
        assert float(record["overhead"]) > 0

    def test_compact_beats_naive(self, capsys):
        """Test the T gate under both distillation budget sets."""
        overheads = {}
        for label in ("compact", "naive"):
            status, records = machine(capsys, ["overhead", "T", "--omega", "1e8", "--optimize", "--budgets", label])
            assert status == EXIT_OK
            assert records[0]["budgets"] == label
            overheads[label] = float(records[0]["overhead"])
        assert overheads["compact"] < overheads["naive"]

    def test_fixed_schedule(self, capsys):
        """Test a hand-picked T schedule and its assumption ledger."""
        status, records = machine(
            capsys, ["overhead", "T", "--omega", "1e2", "--lambda", "20", "24", "--d", "6", "8"]
        )
        assert status == EXIT_OK
        record = records[0]
        assert (record["lambdas"], record["ds"]) == ("20;24", "6;8")
        assert "breakdown.A_states" in record
        assert "assumption" in record

    def test_rebit(self, capsys):
        """Test the rebit T gate."""
        status, records = machine(capsys, ["overhead", "T", "--omega", "1e6", "--optimize", "--rebit"])
        assert status == EXIT_OK
        assert records[0]["gate"] == "T_RE"
        assert records[0]["rebit"] == "true"

    def test_magic_s_baseline(self, capsys):
        """Test the magic-state S comparison."""
        status, records = machine(capsys, ["overhead", "S", "--omega", "1e8", "--optimize", "--compare-magic-s"])
        assert status == EXIT_OK
        assert [r["record"] for r in records] == ["overhead", "baseline"]
        assert records[1]["gate"] == "S_MAGIC"
        assert records[1]["budgets"] == "naive"
        assert float(records[1]["overhead"]) >= 5 * float(records[0]["overhead"])

    def test_magic_s_baseline_budgets(self, capsys):
        """Test that the baseline can use the compact distillation circuits."""
        argv = ["overhead", "S", "--omega", "1e8", "--optimize", "--compare-magic-s", "--baseline-budgets", "compact"]
        status, records = machine(capsys, argv)
        assert status == EXIT_OK
        assert records[0]["budgets"] == "compact"
        assert records[1]["budgets"] == "compact"

    @pytest.mark.parametrize("argv", [
        ["overhead", "H", "--omega", "1e6"],
        ["overhead", "T", "--omega", "1e6", "--lambda", "10", "12", "--d", "4"],
        ["overhead", "H", "--omega", "1e6", "--lambda", "10", "12", "--d", "4", "5"],
        ["overhead", "H", "--omega", "1e6", "--optimize", "--rebit"],
        ["overhead", "T", "--omega", "1e6", "--optimize", "--compare-magic-s"],
        ["overhead", "T", "--omega", "1e6", "--optimize", "--budgets", "both"],
        ["overhead", "H", "--omega", "-5", "--optimize"],
        ["overhead", "T", "--omega", "1e6", "--lambda", "4", "--d", "4"],
    ])
    def test_input_errors(self, capsys, argv):
        """Test invalid overhead requests."""
        assert main(argv) == EXIT_INPUT

    def test_infeasible(self, capsys):
        """Test that a schedule failing with certainty exits with status 1."""
        assert main(["overhead", "T", "--omega", "1e6", "--lambda", "2", "3", "--d", "1", "1"]) == EXIT_FAILED

    def test_overflow(self, capsys):
        """Test that an overflowing overhead is reported as infeasible."""
        status, records = machine(capsys, ["overhead", "H", "--omega", "1e12", "--lambda", "3", "--d", "1"])
        assert status == EXIT_FAILED
        assert records[0]["feasible"] == "false"
        assert exit_code_for(records) == EXIT_FAILED

    def test_config_file(self, capsys, tmp_path):
        """Test that cost parameters come from --config."""
        path = tmp_path / "steep.toml"
        path.write_text("[cost]\nkappa = 2.0\n", encoding="utf-8")
        argv = ["overhead", "H", "--omega", "1e2", "--lambda", "10", "--d", "3"]
        _, default = machine(capsys, argv)
        _, steep = machine(capsys, argv + ["--config", str(path)])
        assert float(steep[0]["overhead"]) < float(default[0]["overhead"])


class TestSweep:
    """In-process tests of the sweep command."""

    def test_cnot_sweep(self, capsys, tmp_path):
        """Test a 20-point CNOT sweep file."""
        out = tmp_path / "cnot.csv"
        assert main(["sweep", "CNOT", "--out", str(out), "--workers", "2"]) == EXIT_OK
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["omega", "overhead", "l_max", "lambdas", "ds", "eps_A", "eps_Y"]
        assert len(frame) == 20
        assert frame["omega"].iloc[0] == pytest.approx(1e6)
        assert frame["omega"].iloc[-1] == pytest.approx(1e10)
        assert frame["overhead"].is_monotonic_increasing
        assert (frame["l_max"] == 0).all()

    def test_both_budget_sets(self, capsys, tmp_path):
        """Test that --budgets both writes one column group per set."""
        out = tmp_path / "t.csv"
        status = main(["sweep", "T", "--points", "3", "--omega-min", "1e6", "--omega-max", "1e8",
                       "--budgets", "both", "--out", str(out)])
        assert status == EXIT_OK
        frame = pd.read_csv(out)
        assert frame.columns[0] == "omega"
        assert "naive_overhead" in frame.columns and "compact_overhead" in frame.columns
        assert (frame["compact_overhead"] < frame["naive_overhead"]).all()
        summary = capsys.readouterr().out
        assert "naive" in summary and "compact" in summary

    def test_budget_file(self, capsys, tmp_path):
        """Test a sweep with a budget file."""
        budgets = tmp_path / "lean.toml"
        budgets.write_text("[budgets.Y]\nV = 60\nL = 90\n", encoding="utf-8")
        out = tmp_path / "lean.csv"
        status, records = machine(capsys, ["sweep", "T", "--points", "2", "--budgets", str(budgets),
                                           "--out", str(out)])
        assert status == EXIT_OK
        assert records[0]["budgets"] == "lean"
        assert records[0]["points"] == "2"

    @pytest.mark.parametrize("argv", [
        ["sweep", "H", "--points", "0"],
        ["sweep", "H", "--omega-min", "1e8", "--omega-max", "1e6"],
        ["sweep", "H", "--rebit"],
    ])
    def test_input_errors(self, capsys, tmp_path, argv):
        """Test invalid sweep requests."""
        assert main(argv + ["--out", str(tmp_path / "x.csv")]) == EXIT_INPUT

    def test_unwritable_output(self, capsys, tmp_path):
        """Test that an unwritable CSV path is an input error."""
        out = tmp_path / "missing" / "dir" / "h.csv"
        assert main(["sweep", "H", "--points", "2", "--out", str(out)]) == EXIT_INPUT
