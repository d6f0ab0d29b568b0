"""Per-chain token ledger with a rollback journal

Every token movement is a `LedgerMove` between two locations. Locations are
account addresses or one of the bucket names below. `@genesis` and `@mint` are
sources and may go negative; every other location must stay non-negative.
"""

import logging
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional

from pydantic import BaseModel

from xcrelay.core.errors import InsufficientBalance, InvariantViolation

logger = logging.getLogger(__name__)

GENESIS = "@genesis"
MINT = "@mint"
BURNED = "@burned"
MINER = "@miner"
FEE_ESCROW = "@escrow:fees"
PRINCIPAL_ESCROW = "@escrow:principal"
COLLATERAL = "@collateral"

SOURCES = frozenset({GENESIS, MINT})
BUCKETS = frozenset({GENESIS, MINT, BURNED, MINER, FEE_ESCROW, PRINCIPAL_ESCROW, COLLATERAL})


def is_bucket(location: str) -> bool:
    return location in BUCKETS


class LedgerMove(BaseModel):
    """One token movement"""

    src: str
    dst: str
    amount: int
    memo: str = ""
    tx_id: Optional[str] = None


class Ledger:
    """
    Token balances of one chain.

    Example:
        ledger = Ledger("A")
        ledger.issue("alice", 100)
        ledger.move("alice", COLLATERAL, 40, memo="register")
        assert ledger.balance("alice") == 60
    """

    def __init__(self, chain_id: str):
        self.chain_id = chain_id
        self.balances: Dict[str, int] = {}
        self.issued = 0
        self.minted = 0
        self.burned = 0
        self._journal: List[LedgerMove] = []
        self._depth = 0
        self.tx_id: Optional[str] = None

    def balance(self, location: str) -> int:
        return self.balances.get(location, 0)

    def move(self, src: str, dst: str, amount: int, memo: str = "") -> None:
        """
        Move tokens between two locations.

        Raises:
            InsufficientBalance: If a non-source location would go negative
        """
        if amount < 0:
            raise ValueError(f"Negative amount {amount} ({memo})")
        if amount == 0:
            return
        if src not in SOURCES and self.balance(src) < amount:
            raise InsufficientBalance(
                f"{src} holds {self.balance(src)} on {self.chain_id}, needs {amount} ({memo})"
            )
        self._apply(src, dst, amount)
        self._journal.append(
            LedgerMove(src=src, dst=dst, amount=amount, memo=memo, tx_id=self.tx_id)
        )

    def issue(self, account: str, amount: int) -> None:
        """Credit an initial balance at genesis"""
        self.move(GENESIS, account, amount, memo="genesis")

    def mint(self, dst: str, amount: int, memo: str = "mint") -> None:
        self.move(MINT, dst, amount, memo=memo)

    def burn(self, src: str, amount: int, memo: str = "burn") -> None:
        self.move(src, BURNED, amount, memo=memo)

    def _apply(self, src: str, dst: str, amount: int) -> None:
        self.balances[src] = self.balance(src) - amount
        self.balances[dst] = self.balance(dst) + amount
        if src == GENESIS:
            self.issued += amount
        elif src == MINT:
            self.minted += amount
        if dst == BURNED:
            self.burned += amount

    def _revert(self, move: LedgerMove) -> None:
        self.balances[move.src] = self.balance(move.src) + move.amount
        self.balances[move.dst] = self.balance(move.dst) - move.amount
        if move.src == GENESIS:
            self.issued -= move.amount
        elif move.src == MINT:
            self.minted -= move.amount
        if move.dst == BURNED:
            self.burned -= move.amount

    @contextmanager
    def transaction(self, tx_id: Optional[str] = None) -> Iterator["Ledger"]:
        """Group moves; if the block raises, every move made inside is undone"""
        mark = len(self._journal)
        previous, self.tx_id = self.tx_id, tx_id or self.tx_id
        self._depth += 1
        try:
            yield self
        except BaseException:
            while len(self._journal) > mark:
                self._revert(self._journal.pop())
            raise
        finally:
            self._depth -= 1
            self.tx_id = previous

    def drain(self) -> List[LedgerMove]:
        """Moves recorded since the previous drain; only valid outside a transaction"""
        if self._depth:
            raise RuntimeError("Cannot drain the ledger inside a transaction")
        moves, self._journal = self._journal, []
        return moves

    def circulating(self) -> int:
        """Tokens held outside the source and burn locations"""
        return sum(
            amount
            for location, amount in self.balances.items()
            if location not in SOURCES and location != BURNED
        )

    def accounts(self) -> Dict[str, int]:
        """Balances of plain accounts (no buckets)"""
        return {
            location: amount
            for location, amount in sorted(self.balances.items())
            if not is_bucket(location)
        }

    def check_conservation(self) -> None:
        """
        Circulating supply equals issued plus minted minus burned, and no
        non-source location is negative.

        Raises:
            InvariantViolation: If either condition fails
        """
        expected = self.issued + self.minted - self.burned
        actual = self.circulating()
        if actual != expected:
            raise InvariantViolation(
                f"{self.chain_id}: circulating {actual} != issued {self.issued} "
                f"+ minted {self.minted} - burned {self.burned}"
            )
        negative = [
            location
            for location, amount in self.balances.items()
            if amount < 0 and location not in SOURCES
        ]
        if negative:
            raise InvariantViolation(f"{self.chain_id}: negative balances at {negative}")
        logger.debug("%s: conservation ok (%d circulating)", self.chain_id, actual)


def replay(moves: List[LedgerMove]) -> Dict[str, int]:
    """Rebuild balances from a list of moves"""
    balances: Dict[str, int] = {}
    for move in moves:
        balances[move.src] = balances.get(move.src, 0) - move.amount
        balances[move.dst] = balances.get(move.dst, 0) + move.amount
    return balances
