"""Shared fixtures"""

from collections import Counter
from typing import Dict, Optional, Tuple

import pytest

from xcrelay.chain.chain import Chain
from xcrelay.chain.transactions import make_tx
from xcrelay.coordinator.state import CoordinatorParams
from xcrelay.core.types import Block, ChainTx, ExecResult, Payload

ACCOUNTS = ("U", "V", "R1", "R2", "R3", "W", "AL")
START_BALANCE = 10_000


class Channel:
    """Two linked chains driven one block at a time"""

    def __init__(
        self,
        params: Optional[CoordinatorParams] = None,
        balances: Optional[Dict[str, int]] = None,
        **chain_options,
    ):
        initial = {account: START_BALANCE for account in ACCOUNTS}
        initial.update(balances or {})
        self.chains = {
            chain_id: Chain(chain_id, params=params, balances=initial, **chain_options)
            for chain_id in ("A", "B")
        }
        self.chains["A"].link(self.chains["B"])
        self.chains["B"].link(self.chains["A"])
        self._nonces: Counter = Counter()

    @property
    def a(self) -> Chain:
        return self.chains["A"]

    @property
    def b(self) -> Chain:
        return self.chains["B"]

    def tx(self, chain_id: str, submitter: str, payload: Payload, gas_price: int = 1) -> ChainTx:
        nonce = self._nonces[(chain_id, submitter)]
        self._nonces[(chain_id, submitter)] += 1
        return make_tx(
            chain_id, submitter, payload, nonce=nonce, submission_time=0, gas_price=gas_price
        )

    def call(
        self, chain_id: str, submitter: str, payload: Payload, gas_price: int = 1
    ) -> Tuple[ChainTx, ExecResult]:
        """Submit one transaction and mint the block that executes it"""
        tx = self.tx(chain_id, submitter, payload, gas_price)
        self.chains[chain_id].submit_tx(tx)
        block = self.chains[chain_id].mint_block()
        return tx, block.results[block.txs.index(tx)]

    def mint(self, chain_id: str, blocks: int = 1) -> Block:
        for _ in range(blocks):
            block = self.chains[chain_id].mint_block()
        return block


@pytest.fixture
def channel():
    return Channel()


@pytest.fixture
def make_channel():
    return Channel
