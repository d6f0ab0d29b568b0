"""Per-run metrics computed from a trace"""

import logging
from collections import Counter
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from xcrelay.core.errors import MalformedTrace
from xcrelay.core.hashing import canonical_json, sha256_hex
from xcrelay.core.ledger import BURNED, SOURCES
from xcrelay.core.types import MICROS, Block, ChainTx, ContractEvent, ExecResult, to_seconds
from xcrelay.sim.trace import RunTrace

logger = logging.getLogger(__name__)


class LatencyStats(BaseModel):
    """Request-to-acknowledgement times in seconds; all None when nothing was acked"""

    count: int = 0
    min: Optional[float] = None
    median: Optional[float] = None
    p95: Optional[float] = None
    max: Optional[float] = None

    @classmethod
    def from_samples(cls, samples: List[float]) -> "LatencyStats":
        if not samples:
            return cls()
        values = np.asarray(samples, dtype=float)
        return cls(
            count=len(samples),
            min=float(values.min()),
            median=float(np.percentile(values, 50)),
            p95=float(np.percentile(values, 95)),
            max=float(values.max()),
        )


class RelayerLedger(BaseModel):
    """Income and spending of one agent across both chains"""

    rewards: int = 0
    other_income: int = 0
    gas_spent: int = 0
    slashed: int = 0
    net: int = 0
    deliveries: int = 0
    reverts: int = 0


class MetricsReport(BaseModel):
    seed: int
    duration: float
    relayer_count: int
    config_key: str
    fingerprint: str

    requested: int = 0
    acked: int = 0
    timed_out: int = 0
    underpriced: int = 0
    offered_load: float = 0.0
    throughput: float = 0.0
    latency: LatencyStats = Field(default_factory=LatencyStats)
    assignment_delays: List[float] = Field(default_factory=list)

    per_relayer: Dict[str, RelayerLedger] = Field(default_factory=dict)
    strategies: Dict[str, str] = Field(default_factory=dict)
    duplicate_reverts: int = 0
    revert_reasons: Dict[str, int] = Field(default_factory=dict)
    allocation_histogram: Dict[str, int] = Field(default_factory=dict)
    delivery_share_top1: float = 0.0

    fees_released: int = 0
    conservation_ok: bool = True
    closure_ok: bool = True


def _executed(blocks: List[Block]) -> Iterator[Tuple[Block, ChainTx, ExecResult]]:
    for block in blocks:
        if len(block.txs) != len(block.results):
            raise MalformedTrace(f"{block.chain_id} block {block.height}: txs and results differ")
        for tx, result in zip(block.txs, block.results):
            yield block, tx, result


def _events(blocks: List[Block]) -> Iterator[ContractEvent]:
    for _, _, result in _executed(blocks):
        yield from result.events


def config_key(config: Dict[str, Any]) -> str:
    """Hash of a run's config without its seed and roster"""
    reduced = {key: value for key, value in config.items() if key not in ("seed", "agents")}
    return sha256_hex(canonical_json(reduced))


def conservation_holds(balances: Dict[str, int]) -> bool:
    """Circulating tokens equal issued plus minted minus burned, nothing negative"""
    created = -sum(balances.get(source, 0) for source in SOURCES)
    circulating = sum(
        amount
        for location, amount in balances.items()
        if location not in SOURCES and location != BURNED
    )
    negative = any(
        amount < 0 for location, amount in balances.items() if location not in SOURCES
    )
    return not negative and circulating == created - balances.get(BURNED, 0)


def compute(trace: RunTrace) -> MetricsReport:
    """
    Compute the metrics of one run.

    Raises:
        MalformedTrace: Missing run or final record, or inconsistent blocks
    """
    run = trace.run
    final = trace.final
    blocks = trace.blocks()
    duration = to_seconds(run.duration)
    agents = list(run.agents)
    ledgers = {label: RelayerLedger() for label in agents}

    revert_reasons: Counter = Counter()
    duplicate_reverts = 0
    for _, tx, result in _executed(blocks):
        agent = ledgers.get(tx.submitter)
        if agent is not None:
            agent.gas_spent += result.gas_paid
        if result.ok:
            if agent is not None and tx.kind == "deliver_tx":
                agent.deliveries += 1
            continue
        revert_reasons[result.reason or "Reverted"] += 1
        if result.reason == "DuplicateDelivery":
            duplicate_reverts += 1
        if agent is not None:
            agent.reverts += 1

    requested = 0
    underpriced = 0
    timed_out = 0
    latencies: List[float] = []
    delays: List[float] = []
    fees_released = 0
    histogram: Counter = Counter()
    completed_by: Counter = Counter()
    for event in _events(blocks):
        data = event.data
        if event.name == "TaskCreated":
            requested += 1
            if not data.get("fee_adequate", True):
                underpriced += 1
        elif event.name == "TaskAssigned":
            delays.append((data["assigned_time"] - data["requested_time"]) / MICROS)
            for pubkey in data["pubkeys"]:
                histogram[pubkey] += 1
        elif event.name == "Acked":
            latencies.append((data["acked_time"] - data["requested_time"]) / MICROS)
            fees_released += data["fee"]
            completed_by[data["deliverer"]] += 1
            if data["payee"] in ledgers:
                ledgers[data["payee"]].rewards += data["fee"]
        elif event.name == "TimedOut":
            timed_out += 1
            for entry in data["slashes"]:
                if entry["pubkey"] in ledgers:
                    ledgers[entry["pubkey"]].slashed += entry["slashed"]
                if data["reporter"] in ledgers:
                    ledgers[data["reporter"]].other_income += entry["reporter_paid"]
        elif event.name == "AllocatorRewarded" and data["allocator"] in ledgers:
            ledgers[data["allocator"]].other_income += data["amount"]

    for agent in ledgers.values():
        agent.net = agent.rewards + agent.other_income - agent.gas_spent - agent.slashed

    acked = len(latencies)
    replayed = trace.replay_balances()
    report = MetricsReport(
        seed=run.seed,
        duration=duration,
        relayer_count=len(agents),
        config_key=config_key(run.config),
        fingerprint=trace.fingerprint(),
        requested=requested,
        acked=acked,
        timed_out=timed_out,
        underpriced=underpriced,
        offered_load=requested / duration,
        throughput=acked / duration,
        latency=LatencyStats.from_samples(latencies),
        assignment_delays=delays,
        per_relayer=ledgers,
        strategies=dict(run.agents),
        duplicate_reverts=duplicate_reverts,
        revert_reasons=dict(sorted(revert_reasons.items())),
        allocation_histogram=dict(sorted(histogram.items())),
        delivery_share_top1=max(completed_by.values()) / acked if acked else 0.0,
        fees_released=fees_released,
        conservation_ok=all(conservation_holds(b) for b in final.balances.values()),
        closure_ok=replayed == final.balances,
    )
    logger.debug(
        "seed=%d: %d requested, %d acked, %d timed out", run.seed, requested, acked, timed_out
    )
    return report
