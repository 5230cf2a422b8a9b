"""Scenario presets, configuration parsing, and CSV/SVG emission."""

from .config import build_config, parse_config, parse_pairs
from .output import emit_heatmap_csv, emit_table_csv, read_heatmap_csv
from .scenarios import SCENARIO_NAMES, RunReport, Scenario, run_scenario

__all__ = [
    "build_config",
    "parse_config",
    "parse_pairs",
    "emit_heatmap_csv",
    "emit_table_csv",
    "read_heatmap_csv",
    "SCENARIO_NAMES",
    "RunReport",
    "Scenario",
    "run_scenario",
]
