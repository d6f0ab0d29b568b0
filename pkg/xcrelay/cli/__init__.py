"""Experiment runner: presets, checks and the `simulate` entry point"""

from xcrelay.cli.checks import CHECKS, conservation_checks, run_checks
from xcrelay.cli.experiments import RunJob, RunResult, execute, run_jobs
from xcrelay.cli.main import main
from xcrelay.cli.presets import PRESETS, ScenarioPreset, get_preset

__all__ = [
    "main",
    "PRESETS",
    "ScenarioPreset",
    "get_preset",
    "CHECKS",
    "run_checks",
    "conservation_checks",
    "RunJob",
    "RunResult",
    "execute",
    "run_jobs",
]
