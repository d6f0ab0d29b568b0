"""Discrete-event queue"""

import heapq
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel

from xcrelay.core.types import ChainTx

EventKind = Literal["tx_arrival", "mint_block", "tx_send", "workload_injection", "agent_tick"]

# Same-time events run in this order, then in scheduling order.
RANKS = {
    "tx_arrival": 0,
    "mint_block": 1,
    "tx_send": 2,
    "workload_injection": 3,
    "agent_tick": 4,
}


class SimEvent(BaseModel):
    at: int
    kind: EventKind
    seq: int = 0
    chain: Optional[str] = None
    tx: Optional[ChainTx] = None
    sender: Optional[str] = None
    count: int = 0

    @property
    def rank(self) -> int:
        return RANKS[self.kind]


class EventQueue:
    """
    Min-heap of events keyed by (time, kind rank, sequence number).

    Example:
        queue = EventQueue()
        queue.push(SimEvent(at=0, kind="agent_tick"))
        event = queue.pop()
    """

    def __init__(self):
        self._heap: List[Tuple[int, int, int, SimEvent]] = []
        self._seq = 0

    def push(self, event: SimEvent) -> SimEvent:
        """Schedule an event, stamping its sequence number"""
        if event.at < 0:
            raise ValueError(f"Event time {event.at} is negative")
        event = event.model_copy(update={"seq": self._seq})
        self._seq += 1
        heapq.heappush(self._heap, (event.at, event.rank, event.seq, event))
        return event

    def pop(self) -> SimEvent:
        return heapq.heappop(self._heap)[3]

    def peek_time(self) -> Optional[int]:
        return self._heap[0][0] if self._heap else None

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)
