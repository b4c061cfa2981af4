"""
Tests for the ExportService class.
"""

import io
import math

import pandas as pd
import pytest

from domain_relaxation.experiments import SweepResult
from domain_relaxation.physics import DomainPair, InitialConfig, ReservoirSpec, decompose, steady_state
from relaxation_app.services.export_service import ExportService


class TestSeriesExport:
    """Tests for series CSV files."""

    def test_header_and_columns(self, sample_series):
        """Test the comment header and column order."""
        text = ExportService.series_to_csv(sample_series)
        lines = text.splitlines()
        assert lines[0] == "# scenario_name: sample"
        assert "# method: closure" in lines
        assert "# converged: True" in lines
        assert any(line.startswith("# units: t_s=s") for line in lines)
        columns = next(line for line in lines if not line.startswith("#"))
        assert columns == "t_s,jz1,jz2,jz_sum,a12,jz1jz2,trace,jtot2,method"

    def test_read_back(self, sample_series):
        """Test that written rows read back exactly."""
        header, frame = ExportService.read_series(io.StringIO(ExportService.series_to_csv(sample_series)))
        assert header["t_star_s"] == "2"
        assert list(frame["jz1"]) == [1.0, 0.25, 0.125]
        assert list(frame["jz_sum"]) == [0.0, -0.25, -0.125]
        assert frame["trace"].isna().all()
        assert set(frame["method"]) == {"closure"}

    def test_write_series(self, sample_series, tmp_path):
        """Test file naming and directory creation."""
        path = ExportService.series_path(tmp_path / "out", "sample", "closure")
        assert path.name == "sample.closure.csv"
        written = ExportService.write_series(sample_series, path)
        header, frame = ExportService.read_series(written)
        assert len(frame) == 3
        assert header["n1"] == "2"


class TestSweepExport:
    """Tests for sweep tables and fit reports."""

    def test_tau_csv(self, sample_sweep_result):
        """Test the N, tau table."""
        frame = pd.read_csv(io.StringIO(ExportService.tau_to_csv(sample_sweep_result)))
        assert list(frame.columns) == ["N", "tau_s"]
        assert list(frame["N"]) == [10, 20, 40]
        assert frame["tau_s"][0] == pytest.approx(12.0)

    def test_render_fit(self, sample_sweep_result):
        """Test the fit report with failures."""
        text = ExportService.render_fit("scan", sample_sweep_result.fit, sample_sweep_result)
        assert "scenario: scan" in text
        assert "n_range: 10..40" in text
        assert "points: 3" in text
        assert "a_s: 100" in text
        assert "r_squared: 1" in text
        assert "tau_definition: tau = first time" in text
        assert "failed: N=80 IntegrationError: step size underflow" in text

    def test_render_without_fit(self):
        """Test the report of a sweep with too few points."""
        text = ExportService.render_fit("scan", None, SweepResult())
        assert "fit: none" in text

    def test_write_sweep(self, sample_sweep_result, tmp_path):
        """Test that tau.csv and fit.txt are written."""
        paths = ExportService.write_sweep("scan", sample_sweep_result, tmp_path)
        assert [p.name for p in paths] == ["tau.csv", "fit.txt"]
        assert all(p.exists() for p in paths)


class TestOracleExport:
    """Tests for oracle reports."""

    @pytest.fixture
    def prediction(self):
        return steady_state(DomainPair.of(2, 1), InitialConfig.antiparallel(), ReservoirSpec())

    def test_csv(self, prediction):
        """Test sector rows followed by the composed row."""
        frame = pd.read_csv(io.StringIO(ExportService.oracle_to_csv(prediction)), dtype={"J": str})
        assert list(frame["J"]) == ["1/2", "3/2", "ss"]
        assert frame["p_J"].iloc[-1] == pytest.approx(1.0)
        assert frame["jz2"].iloc[-1] == pytest.approx(-1 / 18)

    def test_render(self, prediction):
        """Test the human-readable sector table."""
        decomposition = decompose(DomainPair.of(2, 1), InitialConfig.antiparallel())
        text = ExportService.render_oracle(decomposition, prediction, (math.inf, 0.5))
        assert text.startswith("Sector decomposition of |1, 1> x |1/2, -1/2>")
        assert "effective_temperature_domain1: inf" in text
        assert "effective_temperature_domain2: 500 mK" in text
        assert "nbar: 0" in text
