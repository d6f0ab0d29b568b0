"""Throughput scaling across relayer counts"""

from typing import List, Optional, Sequence

from pydantic import BaseModel, Field

from xcrelay.core.errors import IncomparableConfigs
from xcrelay.metrics.report import MetricsReport

EXHAUSTED = 0.95


class ScalabilityVerdict(BaseModel):
    """Whether throughput grows with every added relayer until the workload runs out"""

    increasing: bool
    relayer_counts: List[int]
    throughputs: List[float]
    exhausted_at: Optional[int] = Field(
        default=None, description="First relayer count acknowledging 95% of requested tasks"
    )
    reason: str = ""

    def __bool__(self) -> bool:
        return self.increasing


def is_flat(values: Sequence[float], tolerance: float = 0.05) -> bool:
    """Every value within `tolerance` (relative) of the first"""
    if not values:
        return True
    base = values[0]
    if base == 0:
        return all(value == 0 for value in values)
    return all(abs(value - base) <= tolerance * abs(base) for value in values)


def compare_scalability(reports: Sequence[MetricsReport]) -> ScalabilityVerdict:
    """
    Check that throughput strictly increases with the relayer count until the
    workload is exhausted, and does not decrease afterwards.

    Args:
        reports: One report per run, ordered by ascending relayer count

    Raises:
        IncomparableConfigs: Fewer than two reports, configs that differ in
            more than the roster, counts not strictly ascending, or a workload
            that does not saturate the single-relayer run
    """
    if len(reports) < 2:
        raise IncomparableConfigs("Need at least two reports to compare")
    keys = {report.config_key for report in reports}
    if len(keys) != 1:
        raise IncomparableConfigs("Reports come from configs that differ beyond the roster")
    counts = [report.relayer_count for report in reports]
    if any(later <= earlier for earlier, later in zip(counts, counts[1:])):
        raise IncomparableConfigs(f"Relayer counts {counts} are not strictly ascending")
    first = reports[0]
    if first.offered_load < 2 * first.throughput:
        raise IncomparableConfigs(
            f"Offered load {first.offered_load:.3f}/s is below twice the "
            f"{counts[0]}-relayer throughput {first.throughput:.3f}/s"
        )

    throughputs = [report.throughput for report in reports]
    exhausted_at = None
    for index in range(1, len(reports)):
        previous = reports[index - 1]
        if exhausted_at is None and previous.requested and (
            previous.acked >= EXHAUSTED * previous.requested
        ):
            exhausted_at = previous.relayer_count
        if exhausted_at is None and throughputs[index] <= throughputs[index - 1]:
            return ScalabilityVerdict(
                increasing=False,
                relayer_counts=counts,
                throughputs=throughputs,
                reason=f"throughput did not increase from {counts[index - 1]} to {counts[index]}",
            )
        if exhausted_at is not None and throughputs[index] < throughputs[index - 1]:
            return ScalabilityVerdict(
                increasing=False,
                relayer_counts=counts,
                throughputs=throughputs,
                exhausted_at=exhausted_at,
                reason=f"throughput fell from {counts[index - 1]} to {counts[index]}",
            )
    return ScalabilityVerdict(
        increasing=True, relayer_counts=counts, throughputs=throughputs, exhausted_at=exhausted_at
    )
