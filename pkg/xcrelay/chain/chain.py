"""A simulated append-only blockchain hosting a Coordinator"""

import logging
from typing import Dict, List, Optional, Set

from xcrelay.chain.mempool import Mempool, Ordering
from xcrelay.coordinator.contract import Coordinator
from xcrelay.coordinator.light_client import LightClient
from xcrelay.coordinator.state import CoordinatorParams
from xcrelay.core.costs import CostTable
from xcrelay.core.errors import (
    ChainError,
    ContractRevert,
    DuplicateTransaction,
    InsufficientBalance,
    InvariantViolation,
    OutOfRange,
)
from xcrelay.core.hashing import hash_fields
from xcrelay.core.ledger import MINER, Ledger, LedgerMove
from xcrelay.core.types import Address, Block, ChainTx, ExecResult, TxId, to_micros

logger = logging.getLogger(__name__)


class Chain:
    """
    One chain of the channel: blocks, mempool, ledger and its Coordinator.

    Example:
        chain_a = Chain("A", block_interval=5.0, balances={"alice": 1_000})
        chain_b = Chain("B", block_interval=5.0)
        chain_a.link(chain_b)
        chain_b.link(chain_a)

        chain_a.submit_tx(tx)
        block = chain_a.mint_block()
    """

    def __init__(
        self,
        chain_id: str,
        block_interval: float = 5.0,
        *,
        max_txs: int = 100,
        ordering: Ordering = "fee_priority",
        costs: Optional[CostTable] = None,
        params: Optional[CoordinatorParams] = None,
        balances: Optional[Dict[Address, int]] = None,
        check_invariants: bool = True,
    ):
        """
        Create a chain holding only its genesis block.

        Args:
            chain_id: Chain label
            block_interval: Seconds between blocks
            max_txs: Default block capacity
            ordering: Mempool policy, "fee_priority" or "fifo"
            costs: Gas cost table
            params: Parameters of the hosted Coordinator
            balances: Initial balances credited at genesis
            check_invariants: Verify conservation after every block
        """
        if block_interval <= 0:
            raise ValueError("block_interval must be positive")
        self.chain_id = chain_id
        self.block_interval = to_micros(block_interval)
        self.max_txs = max_txs
        self.costs = costs or CostTable()
        self.check_invariants = check_invariants

        self.ledger = Ledger(chain_id)
        for account, amount in (balances or {}).items():
            self.ledger.issue(account, amount)
        self.mempool = Mempool(ordering)
        self.coordinator = Coordinator(chain_id, self.ledger, params, self.costs)
        self.blocks: List[Block] = [
            Block(
                chain_id=chain_id, height=0, id=hash_fields(chain_id, 0, "", 0), parent="", time=0
            )
        ]
        self._seen: Set[TxId] = set()

    @property
    def height(self) -> int:
        return len(self.blocks) - 1

    @property
    def head(self) -> Block:
        return self.blocks[-1]

    def link(self, counterparty: "Chain") -> None:
        """Give the Coordinator a light-client view of the counterparty"""
        self.coordinator.link(LightClient(counterparty))

    def balance(self, address: Address) -> int:
        return self.ledger.balance(address)

    @property
    def accounts(self) -> Dict[Address, int]:
        return self.ledger.accounts()

    def submit_tx(self, tx: ChainTx) -> TxId:
        """
        Add a transaction to the mempool.

        Raises:
            InsufficientBalance: The submitter cannot cover gas_price x gas_units
            DuplicateTransaction: The id was already submitted
            ChainError: Wrong chain or gas units not matching the cost table
        """
        if tx.chain_id != self.chain_id:
            raise ChainError(f"Transaction for {tx.chain_id} submitted to {self.chain_id}")
        if tx.gas_units != self.costs.units(tx.kind):
            raise ChainError(f"{tx.kind} requires {self.costs.units(tx.kind)} gas units")
        if tx.id in self._seen:
            raise DuplicateTransaction(f"Transaction {tx.id[:12]} was already submitted")
        if self.ledger.balance(tx.submitter) < tx.gas_cost:
            raise InsufficientBalance(
                f"{tx.submitter} holds {self.ledger.balance(tx.submitter)}, gas costs {tx.gas_cost}"
            )
        self.mempool.add(tx)
        self._seen.add(tx.id)
        return tx.id

    def mint_block(self, max_txs: Optional[int] = None, time: Optional[int] = None) -> Block:
        """
        Order pending transactions, execute them and append the block.

        Transactions whose submitter can no longer pay gas are dropped. Every
        included transaction pays gas whether or not it executes successfully.

        Args:
            max_txs: Capacity (defaults to the chain's max_txs)
            time: Block time in microseconds (defaults to head time + interval)

        Returns:
            The new block
        """
        parent = self.head
        height = parent.height + 1
        block_time = parent.time + self.block_interval if time is None else time
        if block_time <= parent.time:
            raise ChainError(f"Block time {block_time} does not advance past {parent.time}")

        results: List[ExecResult] = []

        def admit(tx: ChainTx) -> bool:
            if self.ledger.balance(tx.submitter) < tx.gas_cost:
                return False
            with self.ledger.transaction(tx.id):
                self.ledger.move(tx.submitter, MINER, tx.gas_cost, memo="gas")
            results.append(self.execute_tx(tx, height, block_time))
            return True

        capacity = self.max_txs if max_txs is None else max_txs
        txs = self.mempool.select(capacity, admit)
        block = Block(
            chain_id=self.chain_id,
            height=height,
            id=hash_fields(
                self.chain_id,
                height,
                parent.id,
                block_time,
                [tx.id for tx in txs],
                [[result.status, result.reason] for result in results],
            ),
            parent=parent.id,
            time=block_time,
            txs=txs,
            results=results,
        )
        self.blocks.append(block)
        logger.debug(
            "%s: block %d with %d txs (%d reverted)",
            self.chain_id,
            height,
            len(txs),
            sum(1 for result in results if not result.ok),
        )
        if self.check_invariants:
            self.verify_invariants()
        return block

    def execute_tx(self, tx: ChainTx, height: int, time: int) -> ExecResult:
        """
        Execute a transaction's payload against the Coordinator.

        A revert undoes every ledger move of the call; gas is charged by the
        caller and is not part of this.
        """
        try:
            with self.ledger.transaction(tx.id):
                _, events = self.coordinator.dispatch(tx, height, time)
        except ContractRevert as exc:
            logger.debug("%s: %s %s reverted: %s", self.chain_id, tx.kind, tx.id[:12], exc)
            return ExecResult(
                status="reverted", reason=exc.code, detail=str(exc), gas_paid=tx.gas_cost
            )
        return ExecResult(status="success", gas_paid=tx.gas_cost, events=events)

    def read_blocks(self, from_height: int) -> List[Block]:
        """
        Blocks from `from_height` to the head, inclusive.

        Raises:
            OutOfRange: from_height is negative or beyond the head
        """
        if from_height < 0 or from_height > self.height:
            raise OutOfRange(f"{self.chain_id}: height {from_height} outside [0, {self.height}]")
        return self.blocks[from_height:]

    def verify_invariants(self) -> None:
        """
        Raises:
            InvariantViolation: Ledger conservation or a Coordinator tally fails
        """
        self.ledger.check_conservation()
        problems = self.coordinator.check_invariants()
        if problems:
            raise InvariantViolation("; ".join(problems))

    def drain_moves(self) -> List[LedgerMove]:
        """Ledger moves since the previous call"""
        return self.ledger.drain()
