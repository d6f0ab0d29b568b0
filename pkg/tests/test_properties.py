"""Randomised properties of unbonding and whole runs"""

import numpy as np
import pytest

from xcrelay.chain.chain import Chain
from xcrelay.coordinator.contract import Coordinator
from xcrelay.coordinator.light_client import LightClient
from xcrelay.core.errors import StillUnbonding
from xcrelay.core.hashing import hash_fields
from xcrelay.core.ledger import Ledger
from xcrelay.core.types import (
    MICROS,
    CallContext,
    ProofOfAbsence,
    ReclaimCall,
    RegisterCall,
    SubmitTimeoutCall,
    TransferCall,
    WithdrawCall,
)
from xcrelay.metrics import compute
from xcrelay.sim import load_config, run

from .test_sim import EXAMPLE_CONFIG

MARGIN = 5
SLASH = 10


@pytest.fixture(scope="module")
def destination():
    chain = Chain("B", check_invariants=False)
    for _ in range(40):
        chain.mint_block()
    return chain


def context(caller, height, *tag):
    return CallContext(
        tx_id=hash_fields(caller, height, *tag), caller=caller, height=height, time=height * MICROS
    )


def unbonding_case(seed, destination):
    rng = np.random.default_rng(seed)
    ledger = Ledger("A")
    ledger.issue("R", 1_000)
    ledger.issue("U", 100_000)
    coordinator = Coordinator("A", ledger)
    coordinator.link(LightClient(destination))

    deposit = int(rng.integers(100, 301))
    coordinator.register(context("R", 1, seed), RegisterCall(deposit=deposit))
    timeouts = [int(value) for value in rng.integers(1, 31, size=int(rng.integers(0, 6)))]
    hashes = []
    for index, timeout in enumerate(timeouts):
        ctx = context("U", 2 + index, seed, index)
        coordinator.transfer(
            ctx, TransferCall(recipient="V", amount=10, timeout_height=timeout, fee=30)
        )
        hashes.append(ctx.tx_id)

    now = 2 + len(timeouts) + int(rng.integers(0, 20))
    end = coordinator.withdraw(context("R", now, seed), WithdrawCall())
    assert end >= now + MARGIN
    assert all(end > timeout for timeout in timeouts)
    with pytest.raises(StillUnbonding):
        coordinator.reclaim(context("R", end - 1, seed), ReclaimCall())

    reported = 0
    for request_hash, timeout in zip(hashes, timeouts):
        if rng.random() < 0.5:
            continue
        proof = ProofOfAbsence(
            request_hash=request_hash, timeout_height=timeout, attested_dest_height=timeout
        )
        coordinator.submit_timeout(
            context("W", end - 1, request_hash),
            SubmitTimeoutCall(proof=proof, header_height=timeout),
        )
        reported += 1

    returned = coordinator.reclaim(context("R", end, seed), ReclaimCall())
    assert returned == deposit - SLASH * reported
    assert ledger.balance("R") == 1_000 - deposit + returned
    assert coordinator.check_invariants() == []
    ledger.check_conservation()


def test_unbonding_outlasts_pending_timeouts(destination):
    """Test reclaim waits past every pending timeout and returns collateral minus slashes"""
    for seed in range(1000):
        unbonding_case(seed, destination)


@pytest.mark.parametrize("seed", range(3))
def test_example_runs_conserve_tokens(seed):
    """Test the example config conserves tokens and its ledger replays exactly"""
    config = load_config(EXAMPLE_CONFIG, {"seed": seed, "duration": 60.0})
    metrics = compute(run(config))
    assert metrics.requested > 0
    assert metrics.conservation_ok
    assert metrics.closure_ok
