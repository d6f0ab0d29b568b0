"""Base types and models used throughout the simulator"""

from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field
from typing_extensions import Annotated

Address = str
TxId = str
RelayerId = int

# Simulation time is an integer count of microseconds.
MICROS = 1_000_000


def to_micros(seconds: float) -> int:
    """Convert seconds to integer simulation time"""
    return int(round(seconds * MICROS))


def to_seconds(micros: int) -> float:
    """Convert integer simulation time to seconds"""
    return micros / MICROS


class RequestData(BaseModel):
    """Transfer details of a cross-chain request, as carried to the destination"""

    model_config = ConfigDict(frozen=True)

    request_hash: TxId
    source_chain: str
    dest_chain: str
    sender: Address
    recipient: Address
    amount: int
    timeout_height: int


class Receipt(BaseModel):
    """Destination-side record of a processed request"""

    model_config = ConfigDict(frozen=True)

    request_hash: TxId
    receipt_hash: str
    source_chain: str
    dest_chain: str
    dest_height: int
    deliverer: Address


class ProofOfAbsence(BaseModel):
    """Evidence that a request was not processed on the destination by its timeout"""

    model_config = ConfigDict(frozen=True)

    request_hash: TxId
    timeout_height: int
    attested_dest_height: int


class Assignment(BaseModel):
    """One (request, relayer) pair submitted through assign_tasks"""

    model_config = ConfigDict(frozen=True)

    request_hash: TxId
    relayer_id: RelayerId


# Contract call payloads. The `kind` literal is the discriminator and the
# key of the gas cost table.


class PlainCall(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["plain"] = "plain"
    memo: str = ""


class TransferCall(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["transfer"] = "transfer"
    recipient: Address
    amount: int = Field(gt=0)
    timeout_height: int = Field(ge=0)
    fee: int = Field(ge=0)


class RegisterCall(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["register"] = "register"
    deposit: int = Field(ge=0)


class WithdrawCall(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["withdraw"] = "withdraw"


class ReclaimCall(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["reclaim"] = "reclaim"


class AssignTasksCall(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["assign_tasks"] = "assign_tasks"
    assignments: List[Assignment]


class DeliverTxCall(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["deliver_tx"] = "deliver_tx"
    request: RequestData
    source_header_height: int
    header_height: Optional[int] = None


class ProveDeliveryCall(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["prove_delivery"] = "prove_delivery"
    receipt: Receipt
    header_height: Optional[int] = None


class SubmitTimeoutCall(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["submit_timeout"] = "submit_timeout"
    proof: ProofOfAbsence
    header_height: Optional[int] = None


class UpdateClientCall(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["update_client"] = "update_client"
    header_height: int


Payload = Annotated[
    Union[
        PlainCall,
        TransferCall,
        RegisterCall,
        WithdrawCall,
        ReclaimCall,
        AssignTasksCall,
        DeliverTxCall,
        ProveDeliveryCall,
        SubmitTimeoutCall,
        UpdateClientCall,
    ],
    Field(discriminator="kind"),
]

PayloadKind = Literal[
    "plain",
    "transfer",
    "register",
    "withdraw",
    "reclaim",
    "assign_tasks",
    "deliver_tx",
    "prove_delivery",
    "submit_timeout",
    "update_client",
]


class ChainTx(BaseModel):
    """A transaction submitted to one chain"""

    model_config = ConfigDict(frozen=True)

    id: TxId
    chain_id: str
    submitter: Address
    payload: Payload
    gas_price: int
    gas_units: int
    nonce: int
    submission_time: int

    @property
    def kind(self) -> str:
        return self.payload.kind

    @property
    def gas_cost(self) -> int:
        return self.gas_price * self.gas_units


class ContractEvent(BaseModel):
    """An event emitted by the Coordinator while executing a transaction"""

    name: str
    data: Dict[str, Any] = Field(default_factory=dict)


class ExecResult(BaseModel):
    """Outcome of executing one included transaction"""

    status: Literal["success", "reverted"]
    reason: Optional[str] = None
    detail: Optional[str] = None
    gas_paid: int = 0
    events: List[ContractEvent] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "success"


class Block(BaseModel):
    """An append-only block; `results[i]` is the outcome of `txs[i]`"""

    model_config = ConfigDict(frozen=True)

    chain_id: str
    height: int
    id: str
    parent: str
    time: int
    txs: List[ChainTx] = Field(default_factory=list)
    results: List[ExecResult] = Field(default_factory=list)


TaskPhase = Literal["requested", "delivered", "acked", "timed_out"]


class RelayerRecord(BaseModel):
    """A relayer registered with a Coordinator"""

    pubkey: Address
    id: RelayerId
    collateral: int
    initial_collateral: int
    status: Literal["active", "unbonding", "retired"] = "active"
    unbonding_end: Optional[int] = None
    registered_at: int
    slashed_total: int = 0


class TaskRecord(BaseModel):
    """One cross-chain operation tracked by its source Coordinator"""

    request_hash: TxId
    source_chain: str
    dest_chain: str
    origin_user: Address
    recipient: Address
    amount: int
    fee: int
    timeout_height: int
    assigned: Optional[RelayerId] = None
    assignees: List[RelayerId] = Field(default_factory=list)
    phase: TaskPhase = "requested"
    receipt_hash: Optional[str] = None
    requested_height: int
    requested_time: int
    assigned_height: Optional[int] = None
    assigned_time: Optional[int] = None
    fee_adequate: bool = True
    history: List[TaskPhase] = Field(default_factory=lambda: ["requested"])

    @property
    def is_open(self) -> bool:
        return self.phase in ("requested", "delivered")

    def request_data(self) -> RequestData:
        return RequestData(
            request_hash=self.request_hash,
            source_chain=self.source_chain,
            dest_chain=self.dest_chain,
            sender=self.origin_user,
            recipient=self.recipient,
            amount=self.amount,
            timeout_height=self.timeout_height,
        )


class Ack(BaseModel):
    """Result of a successful prove_delivery"""

    request_hash: TxId
    payee: Address
    fee: int
    receipt_hash: str


class SlashEntry(BaseModel):
    """One relayer's slash and how it was split"""

    relayer_id: RelayerId
    pubkey: Address
    slashed: int
    reporter_paid: int
    user_paid: int
    burned: int


class SlashOutcome(BaseModel):
    """Result of a successful submit_timeout"""

    request_hash: TxId
    reporter: Address
    slashes: List[SlashEntry] = Field(default_factory=list)
    refunded: int = 0

    @property
    def slashed(self) -> int:
        return sum(entry.slashed for entry in self.slashes)


class CallContext(BaseModel):
    """Execution context handed to contract entrypoints"""

    model_config = ConfigDict(frozen=True)

    tx_id: TxId
    caller: Address
    height: int
    time: int
