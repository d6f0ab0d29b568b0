"""An agent's view of both chains, rebuilt from mined blocks only"""

from typing import Dict, Iterable, List, Literal, Mapping, Optional

from pydantic import BaseModel, Field

from xcrelay.chain.chain import Chain
from xcrelay.core.types import (
    Address,
    Block,
    ContractEvent,
    ExecResult,
    Receipt,
    RelayerId,
    RequestData,
    TxId,
)


class TaskView(BaseModel):
    """What an agent knows about one task"""

    request: RequestData
    fee: int
    requested_height: int
    fee_adequate: bool = True
    assignees: List[RelayerId] = Field(default_factory=list)
    phase: Literal["requested", "acked", "timed_out"] = "requested"

    @property
    def request_hash(self) -> TxId:
        return self.request.request_hash

    @property
    def source_chain(self) -> str:
        return self.request.source_chain

    @property
    def dest_chain(self) -> str:
        return self.request.dest_chain

    @property
    def timeout_height(self) -> int:
        return self.request.timeout_height


class ChainView(BaseModel):
    """Head, relayer set and contract parameters of one chain as observed"""

    chain_id: str
    height: int = -1
    time: int = 0
    relayers: List[RelayerId] = Field(default_factory=list)
    pubkeys: Dict[RelayerId, Address] = Field(default_factory=dict)
    ids: Dict[Address, RelayerId] = Field(default_factory=dict)
    collateral: Dict[RelayerId, int] = Field(default_factory=dict)
    unbonding_end: Dict[RelayerId, int] = Field(default_factory=dict)
    collateral_floor: int = 0

    def eligible(self) -> List[RelayerId]:
        """Active relayers the coordinator would allocate to"""
        return [rid for rid in self.relayers if self.collateral.get(rid, 0) > self.collateral_floor]


class Observation:
    """
    Local knowledge of an agent, updated only from blocks at or below each
    chain's head.

    Example:
        observation = Observation(owner="R1")
        observation.sync({"A": chain_a, "B": chain_b})
        for task in observation.pending():
            ...
    """

    def __init__(self, owner: Optional[Address] = None):
        self.owner = owner
        self.chains: Dict[str, ChainView] = {}
        self.tasks: Dict[TxId, TaskView] = {}
        self.receipts: Dict[TxId, Receipt] = {}
        self.own_results: Dict[TxId, ExecResult] = {}

    def head(self, chain_id: str) -> int:
        view = self.chains.get(chain_id)
        return -1 if view is None else view.height

    def view(self, chain_id: str) -> ChainView:
        return self.chains.setdefault(chain_id, ChainView(chain_id=chain_id))

    def sync(self, chains: Mapping[str, Chain]) -> int:
        """Read every block mined since the last sync; returns how many were read"""
        read = 0
        for chain_id in sorted(chains):
            chain = chains[chain_id]
            view = self.view(chain_id)
            view.collateral_floor = chain.coordinator.params.collateral_floor
            if chain.height <= view.height:
                continue
            for block in chain.read_blocks(view.height + 1):
                self.apply_block(block)
                read += 1
        return read

    def apply_block(self, block: Block) -> None:
        view = self.view(block.chain_id)
        view.height = block.height
        view.time = block.time
        for tx, result in zip(block.txs, block.results):
            if self.owner is not None and tx.submitter == self.owner:
                self.own_results[tx.id] = result
            for event in result.events:
                self._apply_event(block, event)

    def _apply_event(self, block: Block, event: ContractEvent) -> None:
        view = self.view(block.chain_id)
        data = event.data
        if event.name == "Registered":
            relayer_id = data["relayer_id"]
            view.relayers = sorted(view.relayers + [relayer_id])
            view.pubkeys[relayer_id] = data["pubkey"]
            view.ids[data["pubkey"]] = relayer_id
            view.collateral[relayer_id] = data["deposit"]
        elif event.name in ("Withdrawn", "AutoUnbonded"):
            relayer_id = data["relayer_id"]
            if relayer_id in view.relayers:
                view.relayers.remove(relayer_id)
            view.unbonding_end[relayer_id] = data["end_height"]
        elif event.name == "Reclaimed":
            view.collateral[data["relayer_id"]] = 0
            view.unbonding_end.pop(data["relayer_id"], None)
        elif event.name == "TaskCreated":
            request = RequestData(
                request_hash=data["request_hash"],
                source_chain=data["source_chain"],
                dest_chain=data["dest_chain"],
                sender=data["sender"],
                recipient=data["recipient"],
                amount=data["amount"],
                timeout_height=data["timeout_height"],
            )
            self.tasks[request.request_hash] = TaskView(
                request=request,
                fee=data["fee"],
                requested_height=block.height,
                fee_adequate=data["fee_adequate"],
            )
        elif event.name == "TaskAssigned":
            self.tasks[data["request_hash"]].assignees = list(data["assignees"])
        elif event.name == "Delivered":
            self.receipts[data["request_hash"]] = Receipt(
                request_hash=data["request_hash"],
                receipt_hash=data["receipt_hash"],
                source_chain=data["source_chain"],
                dest_chain=block.chain_id,
                dest_height=data["dest_height"],
                deliverer=data["deliverer"],
            )
        elif event.name == "Acked":
            self.tasks[data["request_hash"]].phase = "acked"
        elif event.name == "TimedOut":
            self.tasks[data["request_hash"]].phase = "timed_out"
            for entry in data["slashes"]:
                relayer_id = entry["relayer_id"]
                view.collateral[relayer_id] = view.collateral.get(relayer_id, 0) - entry["slashed"]

    def relayer_id(self, chain_id: str, pubkey: Address) -> Optional[RelayerId]:
        return self.view(chain_id).ids.get(pubkey)

    def receipt(self, request_hash: TxId) -> Optional[Receipt]:
        return self.receipts.get(request_hash)

    def reverted(self, tx_id: TxId) -> bool:
        """Whether one of the owner's transactions was seen reverting"""
        result = self.own_results.get(tx_id)
        return result is not None and not result.ok

    def open_tasks(self, source_chain: Optional[str] = None) -> Iterable[TaskView]:
        """Requested tasks in the order they were observed"""
        for task in self.tasks.values():
            if task.phase != "requested":
                continue
            if source_chain is not None and task.source_chain != source_chain:
                continue
            yield task

    def pending(self, source_chain: Optional[str] = None) -> List[TaskView]:
        """Open tasks with no receipt seen on the destination"""
        return [t for t in self.open_tasks(source_chain) if t.request_hash not in self.receipts]

    def awaiting_proof(self, source_chain: Optional[str] = None) -> List[TaskView]:
        """Open tasks whose receipt is visible on the destination"""
        return [t for t in self.open_tasks(source_chain) if t.request_hash in self.receipts]
