"""Running batches of simulations"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict

from xcrelay.metrics.report import MetricsReport, compute
from xcrelay.sim.config import SimConfig, validate_config
from xcrelay.sim.engine import run
from xcrelay.sim.trace import RunTrace

logger = logging.getLogger(__name__)


class RunJob(BaseModel):
    label: str
    config: Dict[str, Any]


class RunResult(BaseModel):
    """One finished run with its config, trace and metrics"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    label: str
    config: SimConfig
    trace: RunTrace
    report: MetricsReport


def execute(job: RunJob) -> RunResult:
    """Validate, run and measure one job; top level so worker processes can import it"""
    config = validate_config(job.config)
    trace = run(config)
    report = compute(trace)
    logger.info(
        "%s (seed %d): %d/%d tasks acknowledged, throughput %.3f/s",
        job.label,
        config.seed,
        report.acked,
        report.requested,
        report.throughput,
    )
    return RunResult(label=job.label, config=config, trace=trace, report=report)


def run_jobs(jobs: Sequence[RunJob], workers: Optional[int] = None) -> List[RunResult]:
    """
    Run jobs, in a process pool when `workers` > 1.

    Results come back in job order whatever order the workers finish in.
    """
    for job in jobs:
        validate_config(job.config)
    if not workers or workers <= 1 or len(jobs) <= 1:
        return [execute(job) for job in jobs]
    logger.info("Running %d jobs on %d workers", len(jobs), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(execute, jobs))
