"""
Tests for the command-line front end.
"""
import pytest
import sys
from pathlib import Path

from click.testing import CliRunner

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.interface.cli import EXIT_SWEEP_FILE, EXIT_UNDEFINED, RunConfig, cli
from src.protocol.trace import TRACE_COLUMNS
from src.analysis.sweep import SWEEP_COLUMNS

VARIANT_FLAGS = ["--protocol", "variant", "--theta1", "90", "--theta2", "90", "--phi2", "90"]


def report(result):
    """Parse 'label value' lines into a dict."""
    lines = [line.split(" ", 1) for line in result.stdout.splitlines() if line]
    return {label: value for label, value in lines}


class TestRunConfig:
    """Test cases for flag validation."""

    def test_variant_needs_h_basis(self):
        """Test that the variant requires theta2 and phi2."""
        with pytest.raises(ValueError):
            RunConfig(command="analytic", protocol="variant", theta1=90.0)

    def test_evan_angles_come_together(self):
        """Test that theta3 and phi3 are given as a pair."""
        with pytest.raises(ValueError):
            RunConfig(command="analytic", theta1=90.0, theta3=10.0)

    def test_eve_needs_basis(self):
        """Test that --eve requires Evan's basis."""
        with pytest.raises(ValueError):
            RunConfig(command="simulate", theta1=90.0, eve=True)

    def test_angles_converted_to_radians(self):
        """Test the degree to radian conversion of the protocol spec."""
        config = RunConfig(command="simulate", theta1=90.0, theta3=180.0, phi3=0.0, eve=True)
        assert config.protocol_spec().theta1 == pytest.approx(1.5707963267948966)
        assert config.eve_strategy().present
        assert config.eve_strategy().theta3 == pytest.approx(3.141592653589793)
        assert not config.eve_strategy(present=False).present


class TestAnalyticCommand:
    """Test cases for the analytic command."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()

    def test_kmb09_symmetric_attack(self):
        """Test the 25% QBER at theta1 = 90, theta3 = 315."""
        result = self.runner.invoke(cli, ["analytic", "--theta1", "90", "--theta3", "315", "--phi3", "0"])
        assert result.exit_code == 0
        values = report(result)
        assert values["qber"] == "0.250000000"
        assert values["iter"] == "0.250000000"
        assert values["eta"] == "0.250000000"
        assert values["eta_evan"] == "0.500000000"

    def test_variant_orthogonal_bases(self):
        """Test the 40% QBER of the (90, 90, 90) variant with Evan in e."""
        result = self.runner.invoke(cli, ["analytic", *VARIANT_FLAGS, "--theta3", "0", "--phi3", "0"])
        assert result.exit_code == 0
        values = report(result)
        assert values["qber"] == "0.400000000"
        assert values["iter"] == "0.333333333"
        assert values["eta"] == "0.166666667"

    def test_without_evan_basis(self):
        """Test that only the no-attack efficiency is available."""
        result = self.runner.invoke(cli, ["analytic", "--theta1", "90"])
        assert result.exit_code == 0
        values = report(result)
        assert values["eta"] == "0.250000000"
        assert values["qber"] == "n/a"
        assert values["eta_evan"] == "n/a"

    @pytest.mark.parametrize("args", [
        ["analytic", "--protocol", "variant", "--theta1", "90"],
        ["analytic", "--theta1", "400"],
        ["analytic", "--theta1", "90", "--theta3", "10"],
        ["analytic", "--theta1", "-5"],
    ])
    def test_usage_errors(self, args):
        """Test exit status 2 for invalid flags."""
        result = self.runner.invoke(cli, args)
        assert result.exit_code == 2

    def test_undefined_qber(self):
        """Test the exit status when e, f and g coincide."""
        result = self.runner.invoke(cli, ["analytic", "--theta1", "0", "--theta3", "0", "--phi3", "0"])
        assert result.exit_code == EXIT_UNDEFINED
        assert "qber" not in result.stdout


class TestSweepCommand:
    """Test cases for the sweep command."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()

    def test_sweep_writes_file(self, tmp_path):
        """Test the sweep file and the summary lines."""
        out = tmp_path / "sweep.csv"
        result = self.runner.invoke(cli, ["sweep", *VARIANT_FLAGS, "--grid", "12", "--out", str(out)])
        assert result.exit_code == 0
        values = report(result)
        assert values["records"] == "144"
        assert values["undefined"] == "0"
        assert values["r_squared"] == "1.00000000"
        assert out.read_text().splitlines()[0] == ",".join(SWEEP_COLUMNS)
        assert len(out.read_text().splitlines()) == 145

    def test_grid_too_small(self, tmp_path):
        """Test the grid precondition."""
        result = self.runner.invoke(cli, ["sweep", "--theta1", "90", "--grid", "1",
                                          "--out", str(tmp_path / "x.csv")])
        assert result.exit_code == 2

    def test_degenerate_fit(self, tmp_path):
        """Test exit status 3 when the QBER is constant."""
        result = self.runner.invoke(cli, ["sweep", "--theta1", "0", "--grid", "8",
                                          "--out", str(tmp_path / "flat.csv")])
        assert result.exit_code == EXIT_UNDEFINED


class TestSimulateCommand:
    """Test cases for the simulate command."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()
        self.args = ["simulate", "--theta1", "90", "--theta3", "45", "--phi3", "0",
                     "--eve", "--photons", "3000", "--seed", "11"]

    def test_deterministic_output(self):
        """Test that the same seed gives the same report."""
        first = self.runner.invoke(cli, self.args)
        second = self.runner.invoke(cli, self.args + ["--workers", "3"])
        assert first.exit_code == 0
        assert first.stdout == second.stdout
        values = report(first)
        assert values["seed"] == "11"
        assert values["eve"] == "on"
        assert values["photons_sent"] == "3000"
        assert int(values["final_key_bits"]) == int(values["key_bits"]) - int(values["tested_bits"])

    def test_auto_seed_is_echoed(self):
        """Test that an omitted seed is drawn and printed."""
        result = self.runner.invoke(cli, ["simulate", "--theta1", "90", "--photons", "500"])
        assert result.exit_code == 0
        assert report(result)["seed"].isdigit()

    def test_trace(self, tmp_path):
        """Test the trace file and transcript check."""
        out = tmp_path / "trace.csv"
        result = self.runner.invoke(cli, ["simulate", *VARIANT_FLAGS, "--photons", "400",
                                          "--seed", "2", "--trace", "--out", str(out)])
        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(TRACE_COLUMNS)
        assert len(lines) == 401
        assert int(report(result)["transcript_messages"]) > 0

    def test_bad_noise(self):
        """Test the noise range."""
        result = self.runner.invoke(cli, ["simulate", "--theta1", "90", "--noise", "1.5"])
        assert result.exit_code == 2


class TestSignatureCommand:
    """Test cases for the signature command."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()
        self.base = ["signature", *VARIANT_FLAGS, "--photons", "100000", "--grid", "36"]

    def test_evan_only_is_on_line(self):
        """Test an intercept-resend session against the line."""
        result = self.runner.invoke(cli, self.base + ["--eve", "--theta3", "60", "--phi3", "45",
                                                      "--seed", "3", "--threshold", "5"])
        assert result.exit_code == 0
        values = report(result)
        assert values["verdict"] == "ON-LINE"
        assert values["threshold"] == "5.00000000 (override)"

    def test_noise_only_is_off_line(self):
        """Test a noisy session without eavesdropping."""
        result = self.runner.invoke(cli, self.base + ["--noise", "0.05", "--seed", "3"])
        assert result.exit_code == 0
        values = report(result)
        assert values["verdict"] == "OFF-LINE"
        assert values["threshold"].endswith("(settings)")

    def test_empty_sweep_file(self, tmp_path):
        """Test exit status 4 for an unusable sweep file."""
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        result = self.runner.invoke(cli, self.base + ["--seed", "1", "--sweep-file", str(empty)])
        assert result.exit_code == EXIT_SWEEP_FILE

    def test_sweep_file_round_trip(self, tmp_path):
        """Test scoring against a sweep written by the sweep command."""
        out = tmp_path / "sweep.csv"
        swept = self.runner.invoke(cli, ["sweep", *VARIANT_FLAGS, "--grid", "36", "--out", str(out)])
        assert swept.exit_code == 0
        result = self.runner.invoke(cli, self.base + ["--noise", "0.05", "--seed", "3",
                                                      "--sweep-file", str(out)])
        assert result.exit_code == 0
        assert report(result)["verdict"] == "OFF-LINE"


class TestDefaultOutputDirectory:
    """Test cases for creating the default output directory."""

    def setup_method(self):
        """Set up test fixtures."""
        self.runner = CliRunner()

    def test_analytic_leaves_no_directory(self, monkeypatch, tmp_path):
        """Test that a command without files does not create the output directory."""
        import main
        from config.settings import settings
        monkeypatch.setattr(settings, "output_dir_path", str(tmp_path / "out"))
        monkeypatch.setattr(sys, "argv", ["kmbqkd", "analytic", "--theta1", "90"])
        with pytest.raises(SystemExit) as exit_info:
            main.main()
        assert exit_info.value.code == 0
        assert not (tmp_path / "out").exists()

    def test_sweep_creates_default_directory(self, monkeypatch, tmp_path):
        """Test that a sweep without --out writes into a fresh output directory."""
        from config.settings import settings
        monkeypatch.setattr(settings, "output_dir_path", str(tmp_path / "out"))
        result = self.runner.invoke(cli, ["sweep", *VARIANT_FLAGS, "--grid", "12"])
        assert (tmp_path / "out" / "sweep_variant_12.csv").is_file()
        assert report(result)["records"] == "144"

    def test_explicit_out_skips_default_directory(self, monkeypatch, tmp_path):
        """Test that --out does not touch the default output directory."""
        from config.settings import settings
        monkeypatch.setattr(settings, "output_dir_path", str(tmp_path / "out"))
        target = tmp_path / "elsewhere" / "trace.csv"
        result = self.runner.invoke(cli, ["simulate", "--theta1", "90", "--photons", "50",
                                          "--seed", "4", "--trace", "--out", str(target)])
        assert result.exit_code == 0
        assert target.is_file()
        assert not (tmp_path / "out").exists()
