"""Simulated light client over the counterparty chain

The simulator owns both chains, so verification reads the counterparty's
recorded history directly, restricted to the height the caller has relayed.
"""

from typing import TYPE_CHECKING, Optional

from xcrelay.core.types import Receipt, RequestData, TaskRecord, TxId

if TYPE_CHECKING:
    from xcrelay.chain.chain import Chain


class LightClient:
    """Read-only view of a counterparty chain"""

    def __init__(self, counterparty: "Chain"):
        self.counterparty = counterparty

    @property
    def chain_id(self) -> str:
        return self.counterparty.chain_id

    @property
    def height(self) -> int:
        """Actual head of the counterparty"""
        return self.counterparty.height

    def header_exists(self, height: int) -> bool:
        return 0 <= height <= self.counterparty.height

    def request_task(self, request_hash: TxId) -> Optional[TaskRecord]:
        return self.counterparty.coordinator.state.tasks.get(request_hash)

    def find_request(self, request_hash: TxId, max_height: int) -> Optional[RequestData]:
        """The request, if it was recorded at or below `max_height`"""
        task = self.request_task(request_hash)
        if task is None or task.requested_height > max_height:
            return None
        return task.request_data()

    def find_receipt(
        self, request_hash: TxId, max_height: Optional[int] = None
    ) -> Optional[Receipt]:
        """The counterparty's receipt, if recorded at or below `max_height`"""
        receipt = self.counterparty.coordinator.state.receipts.get(request_hash)
        if receipt is None:
            return None
        if max_height is not None and receipt.dest_height > max_height:
            return None
        return receipt
