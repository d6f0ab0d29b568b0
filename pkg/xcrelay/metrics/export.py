"""Report documents and flat tables"""

import csv
import io
from pathlib import Path
from typing import Any, Dict, List, Literal, Union

from pydantic import BaseModel, Field, computed_field

from xcrelay.metrics.report import MetricsReport

CSV_COLUMNS = [
    "run",
    "seed",
    "relayer",
    "rewards",
    "other_income",
    "gas_spent",
    "slashed",
    "net",
    "deliveries",
    "reverts",
]

ReportFormat = Literal["json", "csv", "both"]


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    data: Dict[str, Any] = Field(default_factory=dict)


class RunSummary(BaseModel):
    label: str
    report: MetricsReport


class ScenarioOutcome(BaseModel):
    """Everything one invocation produced: per-run reports and check verdicts"""

    scenario: str
    runs: List[RunSummary] = Field(default_factory=list)
    checks: List[CheckResult] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]


def to_csv(outcome: ScenarioOutcome) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for run in outcome.runs:
        for relayer, ledger in run.report.per_relayer.items():
            writer.writerow(
                {"run": run.label, "seed": run.report.seed, "relayer": relayer}
                | ledger.model_dump()
            )
    return buffer.getvalue()


def write_reports(
    outcome: ScenarioOutcome, out_dir: Union[str, Path], report_format: ReportFormat = "both"
) -> List[Path]:
    """Write report.json and/or report.csv into `out_dir` and return the paths"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if report_format in ("json", "both"):
        path = out_dir / "report.json"
        path.write_text(outcome.model_dump_json(indent=2) + "\n", encoding="utf-8")
        written.append(path)
    if report_format in ("csv", "both"):
        path = out_dir / "report.csv"
        path.write_text(to_csv(outcome), encoding="utf-8")
        written.append(path)
    return written
