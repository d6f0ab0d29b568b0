"""Relayer agents"""

import logging
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Sequence, Set

from pydantic import BaseModel, Field

from xcrelay.chain.chain import Chain
from xcrelay.chain.transactions import make_tx
from xcrelay.core.costs import CostTable
from xcrelay.core.types import Address, ChainTx, Payload, RelayerId, TxId
from xcrelay.relayer.view import Observation

if TYPE_CHECKING:
    from xcrelay.relayer.base import Strategy

logger = logging.getLogger(__name__)


class AgentState(BaseModel):
    """Bookkeeping of one agent"""

    label: str
    address: Address
    collateral: int = 100
    source_chains: List[str] = Field(default_factory=lambda: ["A"])
    registered_as: Dict[str, RelayerId] = Field(default_factory=dict)
    nonces: Dict[str, int] = Field(default_factory=dict)
    busy_until: int = 0
    registering: Dict[str, TxId] = Field(default_factory=dict)
    withdrawn: Set[str] = Field(default_factory=set)
    reclaimed: Set[str] = Field(default_factory=set)
    attempted: Set[TxId] = Field(default_factory=set)
    proved: Set[TxId] = Field(default_factory=set)
    reported: Dict[TxId, TxId] = Field(default_factory=dict)
    allocated: Dict[TxId, TxId] = Field(default_factory=dict)
    submitted: int = 0


class RelayerAgent:
    """
    An off-chain agent that observes both chains and submits transactions
    according to its strategy.

    Example:
        agent = RelayerAgent("R1", Coordinated(scan_latency=1.0))
        txs = agent.act({"A": chain_a, "B": chain_b}, now=to_micros(5))
    """

    def __init__(
        self,
        label: str,
        strategy: "Strategy",
        *,
        address: Optional[Address] = None,
        collateral: int = 100,
        source_chains: Sequence[str] = ("A",),
        costs: Optional[CostTable] = None,
    ):
        """
        Initialize an agent.

        Args:
            label: Agent name used in reports
            strategy: Behavioural policy
            address: On-chain address (defaults to the label)
            collateral: Deposit used when the strategy registers
            source_chains: Chains whose transfers this agent relays
            costs: Gas cost table used to build transactions
        """
        self.state = AgentState(
            label=label,
            address=address or label,
            collateral=collateral,
            source_chains=list(source_chains),
        )
        self.strategy = strategy
        self.costs = costs or CostTable()
        self.observation = Observation(owner=self.state.address)

    @property
    def label(self) -> str:
        return self.state.label

    @property
    def address(self) -> Address:
        return self.state.address

    def relayer_id(self, chain_id: str) -> Optional[RelayerId]:
        return self.state.registered_as.get(chain_id)

    def observe(self, chains: Mapping[str, Chain]) -> None:
        """Read new blocks and pick up this agent's registrations"""
        self.observation.sync(chains)
        for chain_id in self.state.source_chains:
            relayer_id = self.observation.relayer_id(chain_id, self.address)
            if relayer_id is not None and self.state.registered_as.get(chain_id) != relayer_id:
                self.state.registered_as[chain_id] = relayer_id
                self.state.registering.pop(chain_id, None)
                logger.debug("%s registered on %s as %d", self.label, chain_id, relayer_id)
        for chain_id, tx_id in list(self.state.registering.items()):
            if self.observation.reverted(tx_id):
                del self.state.registering[chain_id]
                logger.warning("%s: registration on %s reverted", self.label, chain_id)

    def act(self, chains: Mapping[str, Chain], now: int) -> List[ChainTx]:
        """Observe, then let the strategy decide what to submit"""
        self.observe(chains)
        txs = self.strategy.step(self, self.observation, now)
        self.state.submitted += len(txs)
        return txs

    def make_tx(self, chain_id: str, payload: Payload, *, at: int, gas_price: int = 1) -> ChainTx:
        """Build a transaction with this agent's next nonce on `chain_id`"""
        nonce = self.state.nonces.get(chain_id, 0)
        self.state.nonces[chain_id] = nonce + 1
        return make_tx(
            chain_id,
            self.address,
            payload,
            nonce=nonce,
            submission_time=at,
            gas_price=gas_price,
            costs=self.costs,
        )
