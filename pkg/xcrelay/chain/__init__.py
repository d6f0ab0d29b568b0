"""Simulated blockchains"""

from xcrelay.chain.chain import Chain
from xcrelay.chain.mempool import Mempool, Ordering
from xcrelay.chain.transactions import make_tx, tx_id
from xcrelay.core.costs import CostTable
from xcrelay.core.ledger import Ledger, LedgerMove

__all__ = [
    "Chain",
    "CostTable",
    "Ledger",
    "LedgerMove",
    "Mempool",
    "Ordering",
    "make_tx",
    "tx_id",
]
