"""Base strategy interface"""

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Any, ClassVar, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field

from xcrelay.core.costs import CostTable
from xcrelay.core.types import (
    ChainTx,
    DeliverTxCall,
    ProveDeliveryCall,
    RegisterCall,
    TaskRecord,
    to_micros,
)
from xcrelay.relayer.view import Observation, TaskView

if TYPE_CHECKING:
    from xcrelay.relayer.agent import RelayerAgent


class Strategy(BaseModel, ABC):
    """
    Base class for relayer strategies.

    A strategy turns an observation into transactions. Scanning a task's
    request data costs `scan_latency` seconds, so a delivery batch of n tasks
    is submitted n x scan_latency after the scan starts and the agent scans
    nothing new until then. Acknowledgements and reports go out immediately.
    """

    model_config = ConfigDict(extra="forbid")

    variant: ClassVar[str] = "strategy"

    scan_latency: float = Field(default=1.0, gt=0)
    gas_price: int = Field(default=1, ge=1)
    max_tasks_per_tick: Optional[int] = Field(default=None, ge=1)
    timeout_margin: int = Field(default=1, ge=0)

    @abstractmethod
    def step(self, agent: "RelayerAgent", observation: Observation, now: int) -> List[ChainTx]:
        """Transactions to submit at simulation time `now`"""
        pass

    @property
    def delivery_price(self) -> int:
        return self.gas_price

    @property
    def capacity(self) -> Optional[int]:
        """Most tasks processed in one scan (None for unbounded)"""
        return self.max_tasks_per_tick

    def to_dict(self) -> Dict[str, Any]:
        return {"variant": self.variant, **self.model_dump(by_alias=True)}

    def deliverable(self, agent: "RelayerAgent", observation: Observation, task: TaskView) -> bool:
        """Not yet attempted, not yet delivered, and not too close to its timeout"""
        return (
            task.request_hash not in agent.state.attempted
            and observation.receipt(task.request_hash) is None
            and observation.head(task.dest_chain) + self.timeout_margin < task.timeout_height
        )

    def relayed(self, agent: "RelayerAgent", observation: Observation) -> List[TaskView]:
        """Pending tasks originating on the agent's source chains"""
        return [
            task
            for chain_id in agent.state.source_chains
            for task in observation.pending(chain_id)
        ]

    def is_assigned(self, agent: "RelayerAgent", task: TaskView) -> bool:
        relayer_id = agent.relayer_id(task.source_chain)
        return relayer_id is not None and relayer_id in task.assignees

    def register(self, agent: "RelayerAgent", now: int) -> List[ChainTx]:
        """Register on every source chain where the agent is not registered yet"""
        txs = []
        for chain_id in agent.state.source_chains:
            if agent.relayer_id(chain_id) is not None or chain_id in agent.state.registering:
                continue
            tx = agent.make_tx(
                chain_id,
                RegisterCall(deposit=agent.state.collateral),
                at=now,
                gas_price=self.gas_price,
            )
            agent.state.registering[chain_id] = tx.id
            txs.append(tx)
        return txs

    def deliver(
        self,
        agent: "RelayerAgent",
        observation: Observation,
        now: int,
        candidates: Sequence[TaskView],
    ) -> List[ChainTx]:
        """Scan up to `capacity` candidates and submit their deliveries when the scan ends"""
        if now < agent.state.busy_until:
            return []
        picked = list(candidates) if self.capacity is None else list(candidates)[: self.capacity]
        if not picked:
            return []

        done_at = now + to_micros(self.scan_latency) * len(picked)
        agent.state.busy_until = done_at
        txs = []
        for task in picked:
            agent.state.attempted.add(task.request_hash)
            source_head = observation.head(task.source_chain)
            txs.append(
                agent.make_tx(
                    task.dest_chain,
                    DeliverTxCall(
                        request=task.request,
                        source_header_height=source_head,
                        header_height=source_head,
                    ),
                    at=done_at,
                    gas_price=self.delivery_price,
                )
            )
        return txs

    def prove(
        self,
        agent: "RelayerAgent",
        observation: Observation,
        now: int,
        tasks: Sequence[TaskView],
    ) -> List[ChainTx]:
        """Acknowledge delivered tasks on their source chains"""
        txs = []
        for task in tasks:
            receipt = observation.receipt(task.request_hash)
            if receipt is None or task.request_hash in agent.state.proved:
                continue
            agent.state.proved.add(task.request_hash)
            txs.append(
                agent.make_tx(
                    task.source_chain,
                    ProveDeliveryCall(
                        receipt=receipt, header_height=observation.head(task.dest_chain)
                    ),
                    at=now,
                    gas_price=self.gas_price,
                )
            )
        return txs


def estimate_profit(
    strategy: Strategy, task: Union[TaskRecord, TaskView, int], cost_table: CostTable
) -> int:
    """
    Expected profit of relaying a task (or a bare fee) end to end.

    Returns:
        fee - gas(deliver_tx) x delivery price - gas(prove_delivery) x gas price
    """
    fee = task if isinstance(task, int) else task.fee
    return (
        fee
        - cost_table.deliver_tx * strategy.delivery_price
        - cost_table.prove_delivery * strategy.gas_price
    )
