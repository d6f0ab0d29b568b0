"""Core module"""

from xcrelay.core.decorators import STRATEGIES, entrypoint, register_strategy
from xcrelay.core.types import (
    Ack,
    Address,
    Assignment,
    Block,
    CallContext,
    ChainTx,
    ContractEvent,
    ExecResult,
    Payload,
    ProofOfAbsence,
    Receipt,
    RelayerId,
    RelayerRecord,
    RequestData,
    SlashEntry,
    SlashOutcome,
    TaskRecord,
    TxId,
    to_micros,
    to_seconds,
)

__all__ = [
    "entrypoint",
    "register_strategy",
    "STRATEGIES",
    "Ack",
    "Address",
    "Assignment",
    "Block",
    "CallContext",
    "ChainTx",
    "ContractEvent",
    "ExecResult",
    "Payload",
    "ProofOfAbsence",
    "Receipt",
    "RelayerId",
    "RelayerRecord",
    "RequestData",
    "SlashEntry",
    "SlashOutcome",
    "TaskRecord",
    "TxId",
    "to_micros",
    "to_seconds",
]
