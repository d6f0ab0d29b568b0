"""Machine verdicts for the scenario presets

Each check reads the finished runs of a preset and returns `CheckResult`s.
Token amounts are compared exactly.
"""

from collections import defaultdict
from fractions import Fraction
from math import floor
from typing import Callable, Dict, Iterator, List, Sequence, Set, Tuple

from xcrelay.cli.experiments import RunResult
from xcrelay.core.errors import IncomparableConfigs
from xcrelay.core.types import Block, ChainTx, ContractEvent, ExecResult
from xcrelay.metrics.export import CheckResult
from xcrelay.metrics.fairness import allocation_experiment, fairness_test
from xcrelay.metrics.scalability import compare_scalability, is_flat
from xcrelay.relayer.base import estimate_profit
from xcrelay.relayer.strategies import create_strategy
from xcrelay.sim.trace import RunTrace

FAIRNESS_SEEDS = 5
FAIRNESS_TASKS = 10_000
FAIRNESS_RELAYERS = 4
FAIRNESS_TOLERANCE = 0.05
FLAT_TOLERANCE = 0.05

Check = Callable[[Sequence[RunResult]], List[CheckResult]]
CHECKS: Dict[str, Check] = {}


def check(name: str) -> Callable[[Check], Check]:
    def decorator(func: Check) -> Check:
        CHECKS[name] = func
        return func

    return decorator


def _executed(trace: RunTrace) -> Iterator[Tuple[Block, ChainTx, ExecResult]]:
    for block in trace.blocks():
        yield from ((block, tx, result) for tx, result in zip(block.txs, block.results))


def _events(trace: RunTrace, name: str) -> List[ContractEvent]:
    return [
        event
        for _, _, result in _executed(trace)
        for event in result.events
        if event.name == name
    ]


def _strategy_of(result: RunResult, label: str):
    for entry_label, entry in result.config.roster():
        if entry_label == label:
            return create_strategy(entry.strategy, entry.params)
    raise KeyError(label)


def _labels_with(result: RunResult, *variants: str) -> List[str]:
    return [label for label, variant in result.report.strategies.items() if variant in variants]


def _by_label(results: Sequence[RunResult]) -> Dict[str, RunResult]:
    return {result.label: result for result in results}


def conservation_checks(results: Sequence[RunResult]) -> List[CheckResult]:
    """Token conservation and accounting closure of every run"""
    return [
        CheckResult(
            name=f"conservation[{result.label}]",
            passed=result.report.conservation_ok and result.report.closure_ok,
            detail=(
                f"conservation {'ok' if result.report.conservation_ok else 'FAILED'}, "
                f"ledger replay {'matches' if result.report.closure_ok else 'DIFFERS'}"
            ),
        )
        for result in results
    ]


@check("scenario1")
def check_scenario1(results: Sequence[RunResult]) -> List[CheckResult]:
    result = results[0]
    report = result.report
    fee = result.config.workload.fee
    costs = result.config.costs
    tasks = report.requested
    winners = [label for label, ledger in report.per_relayer.items() if ledger.net > 0]
    checks = [
        CheckResult(
            name="scenario1.duplicates",
            passed=report.duplicate_reverts == tasks * (report.relayer_count - 1),
            detail=f"{report.duplicate_reverts} DuplicateDelivery reverts over {tasks} tasks",
        )
    ]
    if len(winners) != 1:
        checks.append(
            CheckResult(
                name="scenario1.single_winner",
                passed=False,
                detail=f"relayers with positive net: {winners}",
            )
        )
        return checks

    winner = winners[0]
    expected = tasks * estimate_profit(_strategy_of(result, winner), fee, costs)
    checks.append(
        CheckResult(
            name="scenario1.single_winner",
            passed=report.per_relayer[winner].net == expected,
            detail=f"{winner} net {report.per_relayer[winner].net}, expected {expected}",
        )
    )
    for label, ledger in report.per_relayer.items():
        if label == winner:
            continue
        price = _strategy_of(result, label).delivery_price
        lost = ledger.reverts * costs.deliver_tx * price
        checks.append(
            CheckResult(
                name=f"scenario1.loser[{label}]",
                passed=ledger.net == -lost and ledger.reverts == tasks,
                detail=f"{label} net {ledger.net} after {ledger.reverts} reverted deliveries",
            )
        )
    return checks


@check("scenario2")
def check_scenario2(results: Sequence[RunResult]) -> List[CheckResult]:
    result = results[0]
    report = result.report
    fee = result.config.workload.fee
    costs = result.config.costs
    overbidders = _labels_with(result, "competitive_overbid")
    if not overbidders:
        return [
            CheckResult(name="scenario2.overbid", passed=False, detail="no overbidding relayer")
        ]
    label = overbidders[0]
    ledger = report.per_relayer[label]
    per_task = estimate_profit(_strategy_of(result, label), fee, costs)
    default_per_task = estimate_profit(create_strategy("competitive_default"), fee, costs)
    return [
        CheckResult(
            name="scenario2.wins_all",
            passed=ledger.deliveries == report.requested > 0,
            detail=f"{label} delivered {ledger.deliveries} of {report.requested} tasks",
        ),
        CheckResult(
            name="scenario2.net_per_task",
            passed=ledger.net == per_task * report.requested and per_task < default_per_task,
            detail=(
                f"{label} net {ledger.net} = {report.requested} x {per_task}; "
                f"default-price winner earns {default_per_task} per task"
            ),
        ),
    ]


@check("scenario3")
def check_scenario3(results: Sequence[RunResult]) -> List[CheckResult]:
    result = results[0]
    subset = _labels_with(result, "competitive_subset_first")
    if not subset:
        return [CheckResult(name="scenario3.early", passed=False, detail="no subset-first relayer")]
    label = subset[0]
    batch = _strategy_of(result, label).capacity

    deliveries = [
        (block.height, tx, outcome)
        for block, tx, outcome in _executed(result.trace)
        if tx.kind == "deliver_tx"
    ]
    early = [
        (height, tx)
        for height, tx, outcome in deliveries
        if tx.submitter == label and outcome.ok
    ]
    others = [height for height, tx, _ in deliveries if tx.submitter != label]
    if not early or not others:
        return [
            CheckResult(name="scenario3.early", passed=False, detail="missing deliveries in trace")
        ]
    early_heights = sorted({height for height, _ in early})
    first_full = min(others)
    won = {tx.payload.request.request_hash for _, tx in early}
    remaining = {tx.payload.request.request_hash for _, tx, _ in deliveries} - won
    contested: Dict[str, Set[str]] = defaultdict(set)
    for height, tx, _ in deliveries:
        if height == first_full and tx.payload.request.request_hash in remaining:
            contested[tx.payload.request.request_hash].add(tx.submitter)
    return [
        CheckResult(
            name="scenario3.early",
            passed=len(early) == batch and early_heights == [first_full - 1],
            detail=(
                f"{label} landed {len(early)} deliveries at heights {early_heights}; "
                f"full scanners first land at {first_full}"
            ),
        ),
        CheckResult(
            name="scenario3.contested",
            passed=len(remaining) == 1 and all(len(s) >= 2 for s in contested.values())
            and len(contested) == 1,
            detail=f"remaining task contested by {sorted(map(sorted, contested.values()))}",
        ),
    ]


@check("scalability")
def check_scalability(results: Sequence[RunResult]) -> List[CheckResult]:
    coordinated = [r.report for r in results if r.label.startswith("coordinated-")]
    competitive = [r.report for r in results if r.label.startswith("competitive-")]
    coordinated.sort(key=lambda report: report.relayer_count)
    competitive.sort(key=lambda report: report.relayer_count)
    throughputs = [report.throughput for report in competitive]
    try:
        verdict = compare_scalability(coordinated)
    except IncomparableConfigs as exc:
        return [CheckResult(name="scalability.coordinated", passed=False, detail=str(exc))]
    return [
        CheckResult(
            name="scalability.coordinated",
            passed=verdict.increasing,
            detail=verdict.reason
            or f"throughput {verdict.throughputs} over relayers {verdict.relayer_counts}",
            data=verdict.model_dump(),
        ),
        CheckResult(
            name="scalability.competitive_flat",
            passed=is_flat(throughputs, FLAT_TOLERANCE),
            detail=f"throughput {throughputs} over relayers "
            f"{[report.relayer_count for report in competitive]}",
        ),
    ]


@check("fairness")
def check_fairness(results: Sequence[RunResult]) -> List[CheckResult]:
    base_seed = results[0].config.seed
    checks = []
    for seed in range(base_seed, base_seed + FAIRNESS_SEEDS):
        counts = allocation_experiment(seed, FAIRNESS_TASKS, FAIRNESS_RELAYERS)
        outcome = fairness_test(counts)
        checks.append(
            CheckResult(
                name=f"fairness[seed={seed}]",
                passed=outcome.uniform and outcome.max_relative_deviation <= FAIRNESS_TOLERANCE,
                detail=f"counts {counts}, p={outcome.p_value:.4f}",
                data=outcome.model_dump(),
            )
        )
    histogram = results[0].report.allocation_histogram
    try:
        simulated = fairness_test(histogram)
    except ValueError as exc:
        checks.append(CheckResult(name="fairness.simulated", passed=False, detail=str(exc)))
        return checks
    checks.append(
        CheckResult(
            name="fairness.simulated",
            passed=simulated.uniform and len(histogram) == FAIRNESS_RELAYERS,
            detail=f"assignments in the simulated run {histogram}, p={simulated.p_value:.4f}",
            data=simulated.model_dump(),
        )
    )
    return checks


def _slashing_checks(result: RunResult) -> List[CheckResult]:
    params = result.config.coordinator
    report = result.report
    timeouts = _events(result.trace, "TimedOut")
    inactive = _labels_with(result, "abandoner", "silent_after_withdraw")
    reporters = _labels_with(result, "timeout_reporter")

    slashed_count: Dict[str, int] = defaultdict(int)
    reporter_income: Dict[str, int] = defaultdict(int)
    split_ok = True
    for event in timeouts:
        for entry in event.data["slashes"]:
            slashed_count[entry["pubkey"]] += 1
            reporter_income[event.data["reporter"]] += entry["reporter_paid"]
            expected = floor(entry["slashed"] * Fraction(str(params.reporter_share)))
            split_ok = split_ok and entry["reporter_paid"] == expected
    checks = [
        CheckResult(
            name="accountability.slashed_per_timeout",
            passed=bool(timeouts)
            and all(
                report.per_relayer[label].slashed == slashed_count[label] * params.slash_per_timeout
                for label in inactive
            )
            and all(
                report.per_relayer[label].slashed == 0
                for label in _labels_with(result, "coordinated")
            ),
            detail=", ".join(
                f"{label}: {report.per_relayer[label].slashed} over {slashed_count[label]} timeouts"
                for label in inactive
            ),
        )
    ]

    resolved = {event.data["request_hash"] for event in timeouts}
    late = [
        (tx, outcome)
        for _, tx, outcome in _executed(result.trace)
        if tx.kind == "submit_timeout"
        and tx.submitter in reporters
        and not outcome.ok
    ]
    checks.append(
        CheckResult(
            name="accountability.first_reporter_paid",
            passed=split_ok
            and all(
                report.per_relayer[label].other_income == reporter_income[label]
                for label in reporters
            )
            and bool(late)
            and all(
                outcome.reason == "AlreadyResolved"
                and tx.payload.proof.request_hash in resolved
                for tx, outcome in late
            ),
            detail=(
                f"reporter income {dict(reporter_income)}; "
                f"{len(late)} later reports reverted AlreadyResolved"
            ),
        )
    )
    return checks


def _theft_checks(result: RunResult) -> List[CheckResult]:
    report = result.report
    thieves = _labels_with(result, "task_thief")
    assigned = {
        event.data["request_hash"]: set(event.data["pubkeys"])
        for event in _events(result.trace, "TaskAssigned")
    }
    acks = _events(result.trace, "Acked")
    return [
        CheckResult(
            name="accountability.thief_loses",
            passed=bool(thieves) and all(report.per_relayer[label].net < 0 for label in thieves),
            detail=", ".join(
                f"{label}: net {report.per_relayer[label].net}, "
                f"{report.per_relayer[label].deliveries} deliveries"
                for label in thieves
            ),
        ),
        CheckResult(
            name="accountability.assignee_paid",
            passed=bool(acks)
            and all(
                event.data["payee"] in assigned.get(event.data["request_hash"], set())
                for event in acks
            ),
            detail=f"{len(acks)} acknowledged tasks",
        ),
    ]


@check("accountability")
def check_accountability(results: Sequence[RunResult]) -> List[CheckResult]:
    runs = _by_label(results)
    checks: List[CheckResult] = []
    if "slashing" in runs:
        checks += _slashing_checks(runs["slashing"])
    if "theft" in runs:
        checks += _theft_checks(runs["theft"])
    return checks


@check("approach2-delay")
def check_approach2_delay(results: Sequence[RunResult]) -> List[CheckResult]:
    runs = _by_label(results)
    checks = []
    if "approach2" in runs:
        result = runs["approach2"]
        interval = max(result.config.chains.A.block_interval, result.config.chains.B.block_interval)
        delays = result.report.assignment_delays
        checks.append(
            CheckResult(
                name="approach2.delay",
                passed=bool(delays) and min(delays) >= interval,
                detail=f"{len(delays)} assignments, shortest delay "
                f"{min(delays) if delays else None}s",
            )
        )
    if "approach1" in runs:
        delays = runs["approach1"].report.assignment_delays
        checks.append(
            CheckResult(
                name="approach1.no_delay",
                passed=bool(delays) and all(delay == 0 for delay in delays),
                detail=f"{len(delays)} assignments, longest delay {max(delays, default=None)}s",
            )
        )
    return checks


def run_checks(scenario: str, results: Sequence[RunResult]) -> List[CheckResult]:
    """The scenario's own checks (if any) followed by conservation of every run"""
    checks = CHECKS[scenario](results) if scenario in CHECKS else []
    return checks + conservation_checks(results)
