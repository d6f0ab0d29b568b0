"""Relayer strategy variants"""

from typing import TYPE_CHECKING, Any, ClassVar, Dict, List, Optional

from pydantic import ConfigDict, Field

from xcrelay.coordinator.allocation import allocate
from xcrelay.core.decorators import STRATEGIES, register_strategy
from xcrelay.core.types import (
    Assignment,
    AssignTasksCall,
    ChainTx,
    ProofOfAbsence,
    ReclaimCall,
    SubmitTimeoutCall,
    WithdrawCall,
    to_micros,
)
from xcrelay.relayer.base import Strategy
from xcrelay.relayer.view import Observation, TaskView

if TYPE_CHECKING:
    from xcrelay.relayer.agent import RelayerAgent


class Competitive(Strategy):
    """Uncoordinated relaying: deliver every pending task, acknowledge own deliveries"""

    variant: ClassVar[str] = "competitive"

    def targets(self, agent: "RelayerAgent", observation: Observation) -> List[TaskView]:
        return [
            task
            for task in self.relayed(agent, observation)
            if self.deliverable(agent, observation, task)
        ]

    def own_deliveries(self, agent: "RelayerAgent", observation: Observation) -> List[TaskView]:
        tasks = []
        for chain_id in agent.state.source_chains:
            for task in observation.awaiting_proof(chain_id):
                receipt = observation.receipt(task.request_hash)
                if receipt is not None and receipt.deliverer == agent.address:
                    tasks.append(task)
        return tasks

    def step(self, agent: "RelayerAgent", observation: Observation, now: int) -> List[ChainTx]:
        txs = self.prove(agent, observation, now, self.own_deliveries(agent, observation))
        return txs + self.deliver(agent, observation, now, self.targets(agent, observation))


@register_strategy("competitive_default")
class CompetitiveDefault(Competitive):
    """Delivers every pending task at the default gas price"""

    variant: ClassVar[str] = "competitive_default"


@register_strategy("competitive_overbid")
class CompetitiveOverbid(Competitive):
    """Pays `premium` extra per gas unit on deliveries to be ordered first"""

    variant: ClassVar[str] = "competitive_overbid"

    premium: int = Field(default=1, ge=0)

    @property
    def delivery_price(self) -> int:
        return self.gas_price + self.premium


@register_strategy("competitive_subset_first")
class CompetitiveSubsetFirst(Competitive):
    """Scans only `batch` tasks per cycle, so its first deliveries go out earlier"""

    variant: ClassVar[str] = "competitive_subset_first"

    batch: int = Field(default=2, ge=1)

    @property
    def capacity(self) -> Optional[int]:
        if self.max_tasks_per_tick is None:
            return self.batch
        return min(self.batch, self.max_tasks_per_tick)


@register_strategy("coordinated")
class Coordinated(Strategy):
    """
    Follows the Coordinator protocol: registers, delivers and acknowledges
    only the tasks assigned to it. With `withdraw_at` set it withdraws at that
    time, keeps serving its pending tasks and reclaims its collateral once the
    unbonding period ends.
    """

    variant: ClassVar[str] = "coordinated"

    withdraw_at: Optional[float] = Field(default=None, ge=0)

    def membership(
        self, agent: "RelayerAgent", observation: Observation, now: int
    ) -> List[ChainTx]:
        txs = self.register(agent, now)
        if self.withdraw_at is None or now < to_micros(self.withdraw_at):
            return txs
        for chain_id in agent.state.source_chains:
            relayer_id = agent.relayer_id(chain_id)
            if relayer_id is None:
                continue
            if chain_id not in agent.state.withdrawn:
                agent.state.withdrawn.add(chain_id)
                txs.append(
                    agent.make_tx(chain_id, WithdrawCall(), at=now, gas_price=self.gas_price)
                )
                continue
            end = observation.view(chain_id).unbonding_end.get(relayer_id)
            if (
                end is not None
                and chain_id not in agent.state.reclaimed
                and observation.head(chain_id) + 1 >= end
            ):
                agent.state.reclaimed.add(chain_id)
                txs.append(agent.make_tx(chain_id, ReclaimCall(), at=now, gas_price=self.gas_price))
        return txs

    def to_prove(self, agent: "RelayerAgent", observation: Observation) -> List[TaskView]:
        tasks = []
        for chain_id in agent.state.source_chains:
            relayer_id = agent.relayer_id(chain_id)
            for task in observation.awaiting_proof(chain_id):
                if relayer_id is None or relayer_id not in task.assignees:
                    continue
                receipt = observation.receipt(task.request_hash)
                if receipt is not None and (
                    receipt.deliverer == agent.address or task.assignees[0] == relayer_id
                ):
                    tasks.append(task)
        return tasks

    def to_deliver(self, agent: "RelayerAgent", observation: Observation) -> List[TaskView]:
        return [
            task
            for task in self.relayed(agent, observation)
            if self.is_assigned(agent, task) and self.deliverable(agent, observation, task)
        ]

    def step(self, agent: "RelayerAgent", observation: Observation, now: int) -> List[ChainTx]:
        txs = self.membership(agent, observation, now)
        txs += self.prove(agent, observation, now, self.to_prove(agent, observation))
        return txs + self.deliver(agent, observation, now, self.to_deliver(agent, observation))


@register_strategy("task_thief")
class TaskThief(Competitive):
    """Delivers and acknowledges tasks that were assigned to other relayers"""

    variant: ClassVar[str] = "task_thief"

    def targets(self, agent: "RelayerAgent", observation: Observation) -> List[TaskView]:
        return [
            task
            for task in super().targets(agent, observation)
            if task.assignees and not self.is_assigned(agent, task)
        ]


@register_strategy("abandoner")
class Abandoner(Coordinated):
    """Registers and takes tasks but never acknowledges; with deliver=False it does nothing"""

    variant: ClassVar[str] = "abandoner"

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    deliver_assigned: bool = Field(default=True, alias="deliver")

    def step(self, agent: "RelayerAgent", observation: Observation, now: int) -> List[ChainTx]:
        txs = self.membership(agent, observation, now)
        if not self.deliver_assigned:
            return txs
        return txs + self.deliver(agent, observation, now, self.to_deliver(agent, observation))


@register_strategy("silent_after_withdraw")
class SilentAfterWithdraw(Strategy):
    """Registers, withdraws at `withdraw_at` and never relays anything"""

    variant: ClassVar[str] = "silent_after_withdraw"

    withdraw_at: float = Field(default=30.0, ge=0)

    def step(self, agent: "RelayerAgent", observation: Observation, now: int) -> List[ChainTx]:
        txs = self.register(agent, now)
        if now < to_micros(self.withdraw_at):
            return txs
        for chain_id in agent.state.source_chains:
            if agent.relayer_id(chain_id) is None or chain_id in agent.state.withdrawn:
                continue
            agent.state.withdrawn.add(chain_id)
            txs.append(agent.make_tx(chain_id, WithdrawCall(), at=now, gas_price=self.gas_price))
        return txs


@register_strategy("timeout_reporter")
class TimeoutReporter(Strategy):
    """Watches for tasks past their timeout and submits a proof of absence"""

    variant: ClassVar[str] = "timeout_reporter"

    def step(self, agent: "RelayerAgent", observation: Observation, now: int) -> List[ChainTx]:
        txs = []
        for task in observation.open_tasks():
            report_id = agent.state.reported.get(task.request_hash)
            if report_id is not None and not observation.reverted(report_id):
                continue
            if observation.receipt(task.request_hash) is not None:
                continue
            dest_head = observation.head(task.dest_chain)
            if dest_head < task.timeout_height:
                continue
            proof = ProofOfAbsence(
                request_hash=task.request_hash,
                timeout_height=task.timeout_height,
                attested_dest_height=dest_head,
            )
            tx = agent.make_tx(
                task.source_chain,
                SubmitTimeoutCall(proof=proof, header_height=dest_head),
                at=now,
                gas_price=self.gas_price,
            )
            agent.state.reported[task.request_hash] = tx.id
            txs.append(tx)
        return txs


@register_strategy("allocator")
class Allocator(Strategy):
    """
    Computes allocations for unassigned tasks from its view of R and submits
    them. R uses the collateral floor the coordinator enforces. A task is
    allocated again once the previous submission is mined and the task is
    still unassigned.
    """

    variant: ClassVar[str] = "allocator"

    def in_flight(self, agent: "RelayerAgent", observation: Observation, task: TaskView) -> bool:
        tx_id = agent.state.allocated.get(task.request_hash)
        return tx_id is not None and tx_id not in observation.own_results

    def step(self, agent: "RelayerAgent", observation: Observation, now: int) -> List[ChainTx]:
        txs = []
        for chain_id in agent.state.source_chains:
            view = observation.view(chain_id)
            eligible = view.eligible()
            if not eligible:
                continue
            batch = [
                task
                for task in observation.open_tasks(chain_id)
                if not task.assignees and not self.in_flight(agent, observation, task)
            ]
            if self.capacity is not None:
                batch = batch[: self.capacity]
            if not batch:
                continue
            assignments = [
                Assignment(
                    request_hash=task.request_hash,
                    relayer_id=allocate(task.request_hash, eligible),
                )
                for task in batch
            ]
            tx = agent.make_tx(
                chain_id,
                AssignTasksCall(assignments=assignments),
                at=now,
                gas_price=self.gas_price,
            )
            for task in batch:
                agent.state.allocated[task.request_hash] = tx.id
            txs.append(tx)
        return txs


def create_strategy(variant: str, params: Optional[Dict[str, Any]] = None) -> Strategy:
    """
    Build a registered strategy from its variant name and parameters.

    Raises:
        ValueError: Unknown variant
    """
    if variant not in STRATEGIES:
        raise ValueError(f"Unknown strategy {variant}; choose from {sorted(STRATEGIES)}")
    return STRATEGIES[variant].model_validate(params or {})
