"""Deterministic discrete-event engine

One run is a pure function of its `SimConfig`: the only randomness comes
from a numpy generator seeded with `config.seed`, used for network delays
and for the order in which agents act within a tick.
"""

import logging
from typing import Dict, List, Tuple

import numpy as np

from xcrelay.chain.chain import Chain
from xcrelay.core.errors import ChainError
from xcrelay.core.types import ChainTx, to_micros
from xcrelay.relayer.agent import RelayerAgent
from xcrelay.relayer.strategies import create_strategy
from xcrelay.sim.config import CHAIN_IDS, SimConfig
from xcrelay.sim.events import EventQueue, SimEvent
from xcrelay.sim.trace import (
    ActionRecord,
    BlockRecord,
    FinalRecord,
    LedgerRecord,
    RunRecord,
    RunTrace,
)
from xcrelay.sim.workload import WorkloadGenerator

logger = logging.getLogger(__name__)

USERS = "users"


class Simulation:
    """
    Two linked chains, a roster of relayer agents and a user workload,
    driven by an event queue until `config.duration`.

    Example:
        trace = Simulation(config).run()
        blocks_on_b = trace.blocks("B")
    """

    def __init__(self, config: SimConfig):
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.duration = to_micros(config.duration)
        self.delay_bound = config.network.delay_bound
        self.tick_interval = to_micros(config.network.tick_interval)
        self.now = 0

        self.workload = WorkloadGenerator(config.workload, config.costs)
        source_chains = config.workload.source_chains
        self.agents: List[RelayerAgent] = [
            RelayerAgent(
                label,
                create_strategy(entry.strategy, entry.params),
                collateral=entry.collateral,
                source_chains=source_chains,
                costs=config.costs,
            )
            for label, entry in config.roster()
        ]

        balances: Dict[str, int] = {
            user: config.workload.user_balance for user in self.workload.users
        }
        for label, entry in config.roster():
            balances[label] = entry.balance
        balances.update(config.balances)

        self.chains: Dict[str, Chain] = {}
        for chain_id in CHAIN_IDS:
            chain_config = config.chains.get(chain_id)
            self.chains[chain_id] = Chain(
                chain_id,
                chain_config.block_interval,
                max_txs=chain_config.max_txs,
                ordering=chain_config.ordering,
                costs=config.costs,
                params=config.coordinator,
                balances=balances,
                check_invariants=config.check_invariants,
            )
        self.chains["A"].link(self.chains["B"])
        self.chains["B"].link(self.chains["A"])

        self.queue = EventQueue()
        self.trace = RunTrace()
        self._last_arrival: Dict[Tuple[str, str], int] = {}

    def run(self) -> RunTrace:
        """
        Execute the run and return its trace.

        Raises:
            InvariantViolation: A chain failed its post-block checks
        """
        config = self.config
        self.trace.add(
            RunRecord(
                seed=config.seed,
                duration=self.duration,
                config=config.model_dump(mode="json"),
                agents={agent.label: agent.strategy.variant for agent in self.agents},
            )
        )
        for chain_id, chain in self.chains.items():
            self.trace.add(BlockRecord(chain=chain_id, block=chain.head))
            self.trace.add(LedgerRecord(chain=chain_id, height=0, moves=chain.drain_moves()))

        for chain_id, chain in self.chains.items():
            self.queue.push(SimEvent(at=chain.block_interval, kind="mint_block", chain=chain_id))
        for at, count in self.workload.schedule(self.duration):
            self.queue.push(SimEvent(at=at, kind="workload_injection", count=count))
        if self.agents:
            self.queue.push(SimEvent(at=0, kind="agent_tick"))

        logger.info(
            "Run seed=%d: %d agents, %.1fs simulated",
            config.seed,
            len(self.agents),
            config.duration,
        )
        handlers = {
            "tx_arrival": self._on_arrival,
            "mint_block": self._on_mint,
            "tx_send": self._on_send,
            "workload_injection": self._on_injection,
            "agent_tick": self._on_tick,
        }
        while self.queue and self.queue.peek_time() <= self.duration:
            event = self.queue.pop()
            self.now = event.at
            handlers[event.kind](event)

        self.trace.add(
            FinalRecord(
                at=self.duration,
                heights={chain_id: chain.height for chain_id, chain in self.chains.items()},
                balances={
                    chain_id: {
                        location: amount
                        for location, amount in sorted(chain.ledger.balances.items())
                        if amount != 0
                    }
                    for chain_id, chain in self.chains.items()
                },
            )
        )
        logger.info(
            "Run seed=%d finished at heights %s",
            config.seed,
            {chain_id: chain.height for chain_id, chain in self.chains.items()},
        )
        return self.trace

    def _on_mint(self, event: SimEvent) -> None:
        chain = self.chains[event.chain]
        block = chain.mint_block(time=event.at)
        self.trace.add(BlockRecord(chain=event.chain, block=block))
        self.trace.add(
            LedgerRecord(chain=event.chain, height=block.height, moves=chain.drain_moves())
        )
        self.queue.push(
            SimEvent(at=event.at + chain.block_interval, kind="mint_block", chain=event.chain)
        )

    def _on_tick(self, event: SimEvent) -> None:
        for index in self.rng.permutation(len(self.agents)):
            agent = self.agents[int(index)]
            for tx in agent.act(self.chains, event.at):
                self._schedule_send(agent.label, tx)
        self.queue.push(SimEvent(at=event.at + self.tick_interval, kind="agent_tick"))

    def _on_injection(self, event: SimEvent) -> None:
        for tx in self.workload.inject_workload(event.at, event.count, self.chains):
            self._schedule_send(USERS, tx)

    def _schedule_send(self, sender: str, tx: ChainTx) -> None:
        at = max(tx.submission_time, self.now)
        self.queue.push(SimEvent(at=at, kind="tx_send", chain=tx.chain_id, tx=tx, sender=sender))

    def _on_send(self, event: SimEvent) -> None:
        """Draw a delay in (0, delay_bound]; a submitter's transactions arrive in send order"""
        tx = event.tx
        delay = max(1, to_micros(self.delay_bound - self.rng.uniform(0.0, self.delay_bound)))
        key = (tx.chain_id, tx.submitter)
        arrival = max(event.at + delay, self._last_arrival.get(key, 0))
        self._last_arrival[key] = arrival
        self.trace.add(
            ActionRecord(
                at=event.at,
                agent=event.sender,
                chain=tx.chain_id,
                tx_id=tx.id,
                payload=tx.kind,
                arrival=arrival,
            )
        )
        self.queue.push(
            SimEvent(at=arrival, kind="tx_arrival", chain=tx.chain_id, tx=tx, sender=event.sender)
        )

    def _on_arrival(self, event: SimEvent) -> None:
        tx = event.tx
        try:
            self.chains[tx.chain_id].submit_tx(tx)
        except ChainError as exc:
            logger.debug("%s rejected %s from %s: %s", tx.chain_id, tx.kind, event.sender, exc)
            self.trace.add(
                ActionRecord(
                    at=event.at,
                    agent=event.sender,
                    chain=tx.chain_id,
                    tx_id=tx.id,
                    payload=tx.kind,
                    status="rejected",
                    reason=type(exc).__name__,
                )
            )


def run(config: SimConfig) -> RunTrace:
    """Run one simulation"""
    return Simulation(config).run()
