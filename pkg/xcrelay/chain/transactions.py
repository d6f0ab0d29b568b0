"""Transaction construction"""

from typing import Optional

from xcrelay.core.costs import CostTable
from xcrelay.core.hashing import hash_fields
from xcrelay.core.types import Address, ChainTx, Payload, TxId


def tx_id(chain_id: str, submitter: Address, payload: Payload, gas_price: int, nonce: int) -> TxId:
    """Deterministic id over the canonical serialization of the signed fields"""
    return hash_fields(chain_id, submitter, payload.model_dump(mode="json"), gas_price, nonce)


def make_tx(
    chain_id: str,
    submitter: Address,
    payload: Payload,
    *,
    nonce: int,
    submission_time: int,
    gas_price: int = 1,
    costs: Optional[CostTable] = None,
) -> ChainTx:
    """
    Build a transaction whose gas units come from the cost table.

    Args:
        chain_id: Target chain
        submitter: Sender address
        payload: Contract call
        nonce: Per-submitter, per-chain counter
        submission_time: Simulation time (microseconds) the transaction is sent
        gas_price: Tokens per gas unit
        costs: Cost table (defaults to CostTable())

    Returns:
        The transaction
    """
    costs = costs or CostTable()
    return ChainTx(
        id=tx_id(chain_id, submitter, payload, gas_price, nonce),
        chain_id=chain_id,
        submitter=submitter,
        payload=payload,
        gas_price=gas_price,
        gas_units=costs.units(payload.kind),
        nonce=nonce,
        submission_time=submission_time,
    )
