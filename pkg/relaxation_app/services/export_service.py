"""
Export functionality for simulation results.
"""

import io
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from jinja2 import Template
import pandas as pd

from domain_relaxation.core.time_series import SERIES_COLUMNS, UNITS, TimeSeries
from domain_relaxation.experiments.relaxation import RelaxationFit
from domain_relaxation.experiments.sweep import SweepResult
from domain_relaxation.physics.sector_oracle import SectorDecomposition, SteadyStatePrediction
from relaxation_app.utils.formatting import format_float, format_half, format_temperature_k

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

# Metadata keys written to the CSV comment header, in order.
HEADER_KEYS = (
    "scenario_name",
    "method",
    "converged",
    "t_star_s",
    "nbar",
    "gamma_per_s",
    "temperature_k",
    "n1",
    "n2",
    "stepper",
    "frame",
    "coherence_cutoff",
    "bounds_violated",
    "schema_version",
)

FIT_TEMPLATE = Template(
    """# relaxation-time fit tau_N = a / N + b
scenario: {{ name }}
n_range: {{ fit.n_range[0] }}..{{ fit.n_range[1] }}
points: {{ fit.n_values | length }}
a_s: {{ fmt(fit.a) }}
b_s: {{ fmt(fit.b) }}
residual_norm_s: {{ fmt(fit.residual_norm) }}
r_squared: {{ fmt(fit.r_squared) }}
tau_definition: {{ fit.tau_definition }}
{% for failure in failures -%}
failed: N={{ failure.n }} {{ failure.error_type }}: {{ failure.message }}
{% endfor -%}
"""
)

ORACLE_TEMPLATE = Template(
    """Sector decomposition of |{{ half(j1) }}, {{ half(m1) }}> x |{{ half(j2) }}, {{ half(m2) }}>  (N1={{ n1 }}, N2={{ n2 }})
{{ "%-8s %-24s %-24s %-24s" | format("J", "p_J", "jz1_J", "jz2_J") }}
{% for row in rows -%}
{{ "%-8s %-24s %-24s %-24s" | format(half(row.two_J / 2), fmt(row.probability), fmt(row.jz1), fmt(row.jz2)) }}
{% endfor %}
nbar: {{ fmt(nbar) }}
jz1_ss: {{ fmt(jz1) }}
jz2_ss: {{ fmt(jz2) }}
jz_sum_ss: {{ fmt(jz1 + jz2) }}
effective_temperature_domain1: {{ temp1 }}
effective_temperature_domain2: {{ temp2 }}
"""
)


class ExportService:
    """Service for writing series, sweeps and oracle reports."""

    @staticmethod
    def series_header(series: TimeSeries) -> Dict[str, Any]:
        """Ordered metadata for the CSV comment header."""
        meta = {"method": series.method, "converged": series.converged, **series.metadata}
        header = {key: meta[key] for key in HEADER_KEYS if key in meta}
        header["units"] = ", ".join(f"{name}={unit}" for name, unit in UNITS.items())
        return header

    @staticmethod
    def _comment_lines(header: Dict[str, Any]) -> str:
        lines = []
        for key, value in header.items():
            if isinstance(value, float):
                value = format_float(value)
            elif value is None:
                value = "none"
            lines.append(f"# {key}: {value}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def series_to_csv(series: TimeSeries) -> str:
        """CSV text: comment header, then one row per sample in ``SERIES_COLUMNS`` order."""
        frame = pd.DataFrame(series.columns(), columns=list(SERIES_COLUMNS))
        body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
        return ExportService._comment_lines(ExportService.series_header(series)) + body

    @staticmethod
    def write_series(series: TimeSeries, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(ExportService.series_to_csv(series), encoding="utf-8")
        logger.info(f"Wrote {len(series)} samples to {path}")
        return path

    @staticmethod
    def read_series(source: Union[str, Path, io.StringIO]) -> Tuple[Dict[str, str], pd.DataFrame]:
        """Comment metadata and data rows of a series CSV."""
        text = source.getvalue() if isinstance(source, io.StringIO) else Path(source).read_text(encoding="utf-8")
        header = {}
        for line in text.splitlines():
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
        return header, pd.read_csv(io.StringIO(text), comment="#")

    @staticmethod
    def series_path(output_dir: Union[str, Path], scenario_name: str, method: str) -> Path:
        return Path(output_dir) / f"{scenario_name}.{method}.csv"

    # ========================================
    # Sweeps
    # ========================================

    @staticmethod
    def tau_to_csv(result: SweepResult) -> str:
        frame = pd.DataFrame({"N": [row.n for row in result.rows], "tau_s": [row.tau_s for row in result.rows]})
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    @staticmethod
    def render_fit(name: str, fit: Optional[RelaxationFit], result: SweepResult) -> str:
        if fit is None:
            lines = ["# relaxation-time fit tau_N = a / N + b", f"scenario: {name}", "fit: none"]
            lines += [f"failed: N={f.n} {f.error_type}: {f.message}" for f in result.failures]
            return "\n".join(lines) + "\n"
        return FIT_TEMPLATE.render(name=name, fit=fit, failures=result.failures, fmt=format_float)

    @staticmethod
    def write_sweep(name: str, result: SweepResult, output_dir: Union[str, Path]) -> List[Path]:
        """Write tau.csv and fit.txt; returns the written paths."""
        directory = Path(output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        tau_path = directory / "tau.csv"
        fit_path = directory / "fit.txt"
        tau_path.write_text(ExportService.tau_to_csv(result), encoding="utf-8")
        fit_path.write_text(ExportService.render_fit(name, result.fit, result), encoding="utf-8")
        logger.info(f"Wrote {len(result.rows)} sweep rows to {tau_path}")
        return [tau_path, fit_path]

    # ========================================
    # Oracle
    # ========================================

    @staticmethod
    def render_oracle(
        decomposition: SectorDecomposition,
        prediction: SteadyStatePrediction,
        effective_temperatures: Tuple[float, float]
    ) -> str:
        n1, n2 = decomposition.n1, decomposition.n2
        temp1, temp2 = (format_temperature_k(t) for t in effective_temperatures)
        return ORACLE_TEMPLATE.render(
            n1=n1,
            n2=n2,
            j1=n1 / 2,
            j2=n2 / 2,
            m1=decomposition.two_m1 / 2,
            m2=decomposition.two_m2 / 2,
            rows=prediction.sectors,
            nbar=prediction.thermal_occupation,
            jz1=prediction.jz1,
            jz2=prediction.jz2,
            temp1=temp1,
            temp2=temp2,
            half=format_half,
            fmt=format_float,
        )

    @staticmethod
    def oracle_to_csv(prediction: SteadyStatePrediction) -> str:
        """Sector rows followed by the composed steady values in a row labelled ``ss``."""
        rows = [
            {"J": format_half(s.two_J / 2), "p_J": s.probability, "jz1": s.jz1, "jz2": s.jz2}
            for s in prediction.sectors
        ]
        rows.append({"J": "ss", "p_J": math.fsum(s.probability for s in prediction.sectors),
                     "jz1": prediction.jz1, "jz2": prediction.jz2})
        frame = pd.DataFrame(rows, columns=["J", "p_J", "jz1", "jz2"])
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
