"""Metrics computed from run traces"""

from xcrelay.metrics.export import (
    CSV_COLUMNS,
    CheckResult,
    RunSummary,
    ScenarioOutcome,
    to_csv,
    write_reports,
)
from xcrelay.metrics.fairness import (
    FairnessResult,
    allocation_experiment,
    fairness_test,
    task_hashes,
)
from xcrelay.metrics.report import (
    LatencyStats,
    MetricsReport,
    RelayerLedger,
    compute,
    config_key,
    conservation_holds,
)
from xcrelay.metrics.scalability import ScalabilityVerdict, compare_scalability, is_flat

__all__ = [
    "MetricsReport",
    "LatencyStats",
    "RelayerLedger",
    "compute",
    "config_key",
    "conservation_holds",
    "ScalabilityVerdict",
    "compare_scalability",
    "is_flat",
    "FairnessResult",
    "fairness_test",
    "allocation_experiment",
    "task_hashes",
    "CheckResult",
    "RunSummary",
    "ScenarioOutcome",
    "CSV_COLUMNS",
    "to_csv",
    "write_reports",
]
