"""Coordinator parameters and persistent state"""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from xcrelay.core.types import Address, Receipt, RelayerId, RelayerRecord, TaskRecord

AllocationMode = Literal["open", "approach1", "approach2"]


class CoordinatorParams(BaseModel):
    """
    Economic and allocation parameters of a Coordinator.

    `open` disables allocation: tasks carry no assignee and the fee goes to
    whoever delivered first. `approach1` allocates while the transfer executes;
    `approach2` waits for an assign_tasks submission.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    collateral_required: int = Field(default=100, ge=0)
    collateral_floor: int = Field(default=20, ge=0)
    slash_per_timeout: int = Field(default=10, ge=0)
    reporter_share: float = Field(default=0.5, ge=0.0, le=1.0)
    user_refund_share: float = Field(default=0.4, ge=0.0, le=1.0)
    unbonding_margin_k: int = Field(default=5, ge=1)
    allocation_mode: AllocationMode = "approach1"
    redundancy_r: int = Field(default=1, ge=1)
    allocator_reward: int = Field(default=15, ge=0)
    min_profitable_fee: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check_shares(self) -> "CoordinatorParams":
        if self.reporter_share + self.user_refund_share > 1.0:
            raise ValueError("reporter_share + user_refund_share must not exceed 1")
        return self


class AssignmentResult(BaseModel):
    """Per-item outcome of an assign_tasks submission"""

    request_hash: str
    relayer_id: RelayerId
    status: Literal["accepted", "reverted"]
    reason: Optional[str] = None


class CoordinatorState(BaseModel):
    """Everything a Coordinator stores on its chain"""

    relayers: List[RelayerId] = Field(default_factory=list)
    all_records: Dict[RelayerId, RelayerRecord] = Field(default_factory=dict)
    by_pubkey: Dict[Address, RelayerId] = Field(default_factory=dict)
    tasks: Dict[str, TaskRecord] = Field(default_factory=dict)
    receipts: Dict[str, Receipt] = Field(default_factory=dict)
    escrow_total: int = 0
    principal_escrow: int = 0
    counterparty_head: int = 0
    next_relayer_id: RelayerId = 0
    params: CoordinatorParams = Field(default_factory=CoordinatorParams)

    def record_for(self, pubkey: Address) -> Optional[RelayerRecord]:
        """Latest record registered under a public key"""
        relayer_id = self.by_pubkey.get(pubkey)
        return None if relayer_id is None else self.all_records[relayer_id]

    def active_records(self) -> List[RelayerRecord]:
        return [self.all_records[relayer_id] for relayer_id in self.relayers]

    def pending_tasks_of(self, relayer_id: RelayerId) -> List[TaskRecord]:
        """Open tasks that list the relayer among their assignees"""
        return [
            task for task in self.tasks.values() if task.is_open and relayer_id in task.assignees
        ]
