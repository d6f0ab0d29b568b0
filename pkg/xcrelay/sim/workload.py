"""User transfer workload"""

import logging
from typing import Dict, List, Mapping, Optional, Tuple

from xcrelay.chain.chain import Chain
from xcrelay.chain.transactions import make_tx
from xcrelay.core.costs import CostTable
from xcrelay.core.types import ChainTx, TransferCall, to_micros
from xcrelay.sim.config import WorkloadConfig

logger = logging.getLogger(__name__)


class WorkloadGenerator:
    """
    Turns a workload config into injection times and transfer transactions.

    Users are U0..U{n-1}; user Uk sends to recipient Vk on the other chain.
    Senders rotate round-robin, and with direction "both" consecutive
    transfers alternate between the two source chains.
    """

    def __init__(self, config: WorkloadConfig, costs: Optional[CostTable] = None):
        self.config = config
        self.costs = costs or CostTable()
        self.injected = 0
        self._nonces: Dict[Tuple[str, str], int] = {}

    @property
    def users(self) -> List[str]:
        return [f"U{index}" for index in range(self.config.users)]

    @property
    def recipients(self) -> List[str]:
        return [f"V{index}" for index in range(self.config.users)]

    def schedule(self, duration: int) -> List[Tuple[int, int]]:
        """
        Injection times in microseconds with the number of transfers at each.

        A constant rate of r per second starting at t0 injects one transfer at
        t0 + k/r for every k with that time before the stop time (or the end
        of the run). Bursts at or after the end of the run are dropped.
        """
        config = self.config
        if config.pattern == "constant":
            end = duration if config.stop is None else min(to_micros(config.stop), duration)
            times = []
            k = 0
            while True:
                at = to_micros(config.start + k / config.rate)
                if at >= end:
                    break
                times.append((at, 1))
                k += 1
            return times
        if config.pattern == "burst":
            return sorted(
                (to_micros(burst.at), burst.count)
                for burst in config.bursts
                if burst.count > 0 and to_micros(burst.at) < duration
            )
        return []

    def _route(self) -> Tuple[str, str]:
        direction = self.config.direction
        if direction == "a_to_b" or (direction == "both" and self.injected % 2 == 0):
            return "A", "B"
        return "B", "A"

    def inject_workload(self, now: int, count: int, chains: Mapping[str, Chain]) -> List[ChainTx]:
        """
        Build `count` transfer transactions sent at `now`.

        The timeout height is the destination chain's current height plus
        `timeout_blocks`.
        """
        txs = []
        for _ in range(count):
            source, dest = self._route()
            slot = self.injected % self.config.users
            user = self.users[slot]
            key = (source, user)
            nonce = self._nonces.get(key, 0)
            self._nonces[key] = nonce + 1
            payload = TransferCall(
                recipient=self.recipients[slot],
                amount=self.config.amount,
                timeout_height=chains[dest].height + self.config.timeout_blocks,
                fee=self.config.fee,
            )
            txs.append(
                make_tx(
                    source, user, payload, nonce=nonce, submission_time=now, costs=self.costs
                )
            )
            self.injected += 1
        if txs:
            logger.debug("Injected %d transfers at %d", len(txs), now)
        return txs
