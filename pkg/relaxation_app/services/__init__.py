"""
Services for the relaxation command line.
"""

from relaxation_app.services.export_service import ExportService
from relaxation_app.services.scenario_service import ScenarioService

__all__ = [
    "ExportService",
    "ScenarioService"
]
