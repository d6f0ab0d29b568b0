"""Modulo-hash task allocation"""

from typing import List, Sequence

from xcrelay.core.errors import EmptyRelayerSet
from xcrelay.core.hashing import digest_int
from xcrelay.core.types import RelayerId, TxId


def allocation_index(request_hash: TxId, m: int) -> int:
    """i = H(request_hash) mod m"""
    if m < 1:
        raise EmptyRelayerSet("No active relayers to allocate to")
    return digest_int(request_hash) % m


def allocate(request_hash: TxId, relayers: Sequence[RelayerId]) -> RelayerId:
    """
    Pick the relayer responsible for a request.

    Args:
        request_hash: Id of the transaction that created the task
        relayers: Active set R, ascending by relayer id

    Returns:
        R[H(request_hash) mod |R|]

    Raises:
        EmptyRelayerSet: If R is empty
    """
    return relayers[allocation_index(request_hash, len(relayers))]


def allocate_many(request_hash: TxId, relayers: Sequence[RelayerId], r: int) -> List[RelayerId]:
    """The r consecutive relayers R[i], R[i+1 mod m], ... (r clamped to m)"""
    m = len(relayers)
    start = allocation_index(request_hash, m)
    return [relayers[(start + offset) % m] for offset in range(min(r, m))]
