"""Pending transaction pool with miner ordering policies"""

import heapq
import logging
from collections import deque
from typing import Callable, Deque, Dict, List, Literal, Tuple

from xcrelay.core.errors import DuplicateTransaction
from xcrelay.core.types import Address, ChainTx

logger = logging.getLogger(__name__)

Ordering = Literal["fee_priority", "fifo"]


class Mempool:
    """
    Pending transactions, queued per submitter in arrival order.

    Selection never reorders two transactions of the same submitter. Across
    submitters the head transactions compete by:

    - fee_priority: (gas_price desc, submission_time asc, submitter asc, id asc)
    - fifo: arrival order
    """

    def __init__(self, ordering: Ordering = "fee_priority"):
        self.ordering = ordering
        self._queues: Dict[Address, Deque[Tuple[int, ChainTx]]] = {}
        self._ids: Dict[str, ChainTx] = {}
        self._arrivals = 0

    def add(self, tx: ChainTx) -> None:
        if tx.id in self._ids:
            raise DuplicateTransaction(f"Transaction {tx.id[:12]} is already pending")
        self._ids[tx.id] = tx
        self._queues.setdefault(tx.submitter, deque()).append((self._arrivals, tx))
        self._arrivals += 1

    def _key(self, arrival: int, tx: ChainTx) -> Tuple:
        if self.ordering == "fifo":
            return (arrival,)
        return (-tx.gas_price, tx.submission_time, tx.submitter, tx.id)

    def select(self, max_txs: int, admit: Callable[[ChainTx], bool]) -> List[ChainTx]:
        """
        Pop transactions in miner order until `max_txs` are admitted.

        Args:
            max_txs: Block capacity
            admit: Called on each candidate in order; returns False to drop it
                without counting it towards capacity

        Returns:
            Admitted transactions in block order
        """
        heap: List[Tuple[Tuple, Address]] = []
        for submitter, queue in self._queues.items():
            if queue:
                arrival, tx = queue[0]
                heap.append((self._key(arrival, tx), submitter))
        heapq.heapify(heap)

        included: List[ChainTx] = []
        while heap and len(included) < max_txs:
            _, submitter = heapq.heappop(heap)
            queue = self._queues[submitter]
            _, tx = queue.popleft()
            del self._ids[tx.id]
            if admit(tx):
                included.append(tx)
            else:
                logger.debug("dropped %s from %s", tx.id[:12], submitter)
            if queue:
                arrival, head = queue[0]
                heapq.heappush(heap, (self._key(arrival, head), submitter))
            else:
                del self._queues[submitter]
        return included

    def pending(self) -> List[ChainTx]:
        """All pending transactions in arrival order"""
        entries = [entry for queue in self._queues.values() for entry in queue]
        return [tx for _, tx in sorted(entries, key=lambda entry: entry[0])]

    def __contains__(self, tx_id: object) -> bool:
        return tx_id in self._ids

    def __len__(self) -> int:
        return len(self._ids)
