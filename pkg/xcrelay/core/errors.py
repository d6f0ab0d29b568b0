"""Exception hierarchy

Contract reverts carry a stable `code` that is recorded as the revert reason
of the transaction, so traces and metrics never depend on message text.
"""

from typing import Any, Dict, List, Optional


class XCRelayError(Exception):
    """Base class for all simulator errors"""


class InvariantViolation(XCRelayError):
    """A conservation or state-machine invariant failed"""


class ChainError(XCRelayError):
    """Raised by chain-level operations (submission, block reads)"""


class ContractRevert(XCRelayError):
    """A contract call failed; the transaction reverts but still pays gas"""

    code = "Reverted"

    def __init__(self, message: Optional[str] = None):
        super().__init__(message or self.code)


class InsufficientBalance(ChainError, ContractRevert):
    code = "InsufficientBalance"


class OutOfRange(ChainError):
    pass


class DuplicateTransaction(ChainError):
    pass


class InsufficientCollateral(ContractRevert):
    code = "InsufficientCollateral"


class AlreadyRegistered(ContractRevert):
    code = "AlreadyRegistered"


class NotRegistered(ContractRevert):
    code = "NotRegistered"


class StillUnbonding(ContractRevert):
    code = "StillUnbonding"


class NotUnbonding(ContractRevert):
    code = "NotUnbonding"


class EmptyRelayerSet(ContractRevert):
    code = "EmptyRelayerSet"


class InvalidTimeout(ContractRevert):
    code = "InvalidTimeout"


class UnknownTask(ContractRevert):
    code = "UnknownTask"


class UnknownRequest(UnknownTask):
    code = "UnknownRequest"


class AlreadyAssigned(ContractRevert):
    code = "AlreadyAssigned"


class WrongAllocation(ContractRevert):
    code = "WrongAllocation"


class DuplicateDelivery(ContractRevert):
    code = "DuplicateDelivery"


class PastTimeout(ContractRevert):
    code = "PastTimeout"


class InvalidReceipt(ContractRevert):
    code = "InvalidReceipt"


class AlreadyAcked(ContractRevert):
    code = "AlreadyAcked"


class TaskTimedOut(ContractRevert):
    code = "TaskTimedOut"


class InvalidProof(ContractRevert):
    code = "InvalidProof"


class NotTimedOut(ContractRevert):
    code = "NotTimedOut"


class AlreadyResolved(ContractRevert):
    code = "AlreadyResolved"


class StaleHeader(ContractRevert):
    code = "StaleHeader"


class InvalidHeader(ContractRevert):
    code = "InvalidHeader"


class UnsupportedCall(ContractRevert):
    code = "UnsupportedCall"


class ConfigError(XCRelayError):
    """Invalid simulation configuration, with field-level diagnostics"""

    def __init__(self, message: str, diagnostics: Optional[List[Dict[str, Any]]] = None):
        self.diagnostics = diagnostics or []
        if self.diagnostics:
            lines = [f"  {d['field']}: {d['message']}" for d in self.diagnostics]
            message = message + "\n" + "\n".join(lines)
        super().__init__(message)


class MalformedTrace(XCRelayError):
    pass


class IncomparableConfigs(XCRelayError):
    pass
