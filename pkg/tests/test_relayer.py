"""Tests for relayer strategies and agents"""

from typing import ClassVar

import pytest
from pydantic import ValidationError

from xcrelay.coordinator.allocation import allocate
from xcrelay.coordinator.state import CoordinatorParams
from xcrelay.core.costs import CostTable
from xcrelay.core.decorators import STRATEGIES, register_strategy
from xcrelay.core.types import (
    DeliverTxCall,
    ProveDeliveryCall,
    RegisterCall,
    TransferCall,
    WithdrawCall,
    to_micros,
)
from xcrelay.relayer.agent import RelayerAgent
from xcrelay.relayer.base import Strategy, estimate_profit
from xcrelay.relayer.strategies import (
    Abandoner,
    CompetitiveDefault,
    CompetitiveOverbid,
    CompetitiveSubsetFirst,
    create_strategy,
)


def test_estimate_profit():
    """Test profit is the fee minus delivery and proof gas"""
    costs = CostTable()
    assert estimate_profit(CompetitiveDefault(), 30, costs) == 10
    assert estimate_profit(CompetitiveOverbid(premium=1), 30, costs) == 0
    assert estimate_profit(CompetitiveDefault(), 5, costs) == -15
    assert estimate_profit(CompetitiveDefault(gas_price=2), 30, costs) == -10


def test_relay_cost_matches_default_profit_threshold():
    """Test the default fee threshold is where a default relayer breaks even"""
    costs = CostTable()
    assert estimate_profit(CompetitiveDefault(), costs.relay_cost(), costs) == 0


def test_registry_holds_every_variant():
    """Test all strategy variants are registered"""
    assert set(STRATEGIES) >= {
        "competitive_default",
        "competitive_overbid",
        "competitive_subset_first",
        "coordinated",
        "task_thief",
        "abandoner",
        "silent_after_withdraw",
        "timeout_reporter",
        "allocator",
    }


def test_create_strategy():
    """Test building strategies from names and parameters"""
    strategy = create_strategy("competitive_overbid", {"premium": 3})
    assert isinstance(strategy, CompetitiveOverbid)
    assert strategy.delivery_price == 4
    assert strategy.to_dict()["variant"] == "competitive_overbid"

    with pytest.raises(ValueError):
        create_strategy("nope")
    with pytest.raises(ValidationError):
        create_strategy("coordinated", {"scan_latency": 0})
    with pytest.raises(ValidationError):
        create_strategy("coordinated", {"unknown": 1})


def test_strategy_parameters():
    """Test variant-specific parameters"""
    assert CompetitiveSubsetFirst(batch=2).capacity == 2
    assert CompetitiveSubsetFirst(batch=4, max_tasks_per_tick=3).capacity == 3
    assert Abandoner.model_validate({"deliver": False}).deliver_assigned is False


def test_register_strategy_checks_variant():
    """Test the registry refuses a class whose variant differs from its name"""
    with pytest.raises(ValueError):

        @register_strategy("mismatch")
        class Mismatch(Strategy):
            variant: ClassVar[str] = "something_else"

            def step(self, agent, observation, now):
                return []

    assert "mismatch" not in STRATEGIES


def test_coordinated_agent_cycle(channel):
    """Test a coordinated agent registers, delivers its task and proves it"""
    agent = RelayerAgent("R1", create_strategy("coordinated", {"scan_latency": 2.0}))

    txs = agent.act(channel.chains, now=0)
    assert [tx.kind for tx in txs] == ["register"]
    channel.a.submit_tx(txs[0])
    channel.mint("A")
    assert agent.act(channel.chains, now=to_micros(6)) == []
    assert agent.relayer_id("A") == 0

    channel.call("A", "U", TransferCall(recipient="V", amount=10, timeout_height=10, fee=30))
    txs = agent.act(channel.chains, now=to_micros(11))
    assert [tx.kind for tx in txs] == ["deliver_tx"]
    deliver = txs[0]
    assert deliver.chain_id == "B"
    assert deliver.submission_time == to_micros(13)
    assert isinstance(deliver.payload, DeliverTxCall)
    assert deliver.payload.source_header_height == 2
    assert agent.act(channel.chains, now=to_micros(12)) == []

    channel.b.submit_tx(deliver)
    channel.mint("B")
    txs = agent.act(channel.chains, now=to_micros(14))
    assert [tx.kind for tx in txs] == ["prove_delivery"]
    assert isinstance(txs[0].payload, ProveDeliveryCall)
    channel.a.submit_tx(txs[0])
    block = channel.mint("A")
    assert block.results[0].ok
    assert agent.observation.sync(channel.chains) == 1
    assert list(agent.observation.open_tasks()) == []


def test_competitive_agent_ignores_assignment(make_channel):
    """Test a competitive agent targets every pending task"""
    channel = make_channel(params=CoordinatorParams(allocation_mode="open"))
    channel.call("A", "U", TransferCall(recipient="V", amount=10, timeout_height=10, fee=30))
    channel.call("A", "U", TransferCall(recipient="V", amount=10, timeout_height=10, fee=30))
    agent = RelayerAgent("R2", CompetitiveDefault(scan_latency=1.0))

    txs = agent.act(channel.chains, now=to_micros(10))
    assert [tx.kind for tx in txs] == ["deliver_tx", "deliver_tx"]
    assert {tx.submission_time for tx in txs} == {to_micros(12)}
    assert [tx.nonce for tx in txs] == [0, 1]


def test_registration_retried_after_revert(make_channel):
    """Test a reverted registration is submitted again once the revert is seen"""
    channel = make_channel(params=CoordinatorParams(collateral_required=200))
    agent = RelayerAgent("R1", create_strategy("coordinated"), collateral=100)

    txs = agent.act(channel.chains, now=0)
    assert [tx.kind for tx in txs] == ["register"]
    assert agent.act(channel.chains, now=to_micros(1)) == []
    channel.a.submit_tx(txs[0])
    assert channel.mint("A").results[0].reason == "InsufficientCollateral"

    agent.state.collateral = 200
    txs = agent.act(channel.chains, now=to_micros(6))
    assert [tx.kind for tx in txs] == ["register"]
    channel.a.submit_tx(txs[0])
    assert channel.mint("A").results[0].ok
    agent.act(channel.chains, now=to_micros(11))
    assert agent.relayer_id("A") == 0


def test_timeout_reporter_skips_delivered_requests(channel):
    """Test the watcher reports only requests with no receipt on the destination"""
    channel.call("A", "R1", RegisterCall(deposit=100))
    delivered, _ = channel.call(
        "A", "U", TransferCall(recipient="V", amount=10, timeout_height=3, fee=30)
    )
    missed, _ = channel.call(
        "A", "U", TransferCall(recipient="V", amount=10, timeout_height=3, fee=30)
    )
    request = channel.a.coordinator.state.tasks[delivered.id].request_data()
    _, result = channel.call(
        "B", "R1", DeliverTxCall(request=request, source_header_height=3, header_height=3)
    )
    assert result.ok
    channel.mint("B", 2)

    watcher = RelayerAgent("W", create_strategy("timeout_reporter"))
    txs = watcher.act(channel.chains, now=to_micros(20))
    assert [tx.kind for tx in txs] == ["submit_timeout"]
    assert txs[0].payload.proof.request_hash == missed.id
    assert watcher.act(channel.chains, now=to_micros(21)) == []

    channel.a.submit_tx(txs[0])
    block = channel.mint("A")
    assert block.results[0].ok
    assert channel.a.coordinator.state.tasks[missed.id].phase == "timed_out"
    assert channel.a.coordinator.state.tasks[delivered.id].phase == "requested"


def test_allocator_uses_coordinator_floor(make_channel):
    """Test the allocator builds R with the floor the coordinator enforces"""
    params = CoordinatorParams(
        allocation_mode="approach2", collateral_required=10, collateral_floor=5
    )
    channel = make_channel(params=params)
    for pubkey in ("R1", "R2"):
        channel.call("A", pubkey, RegisterCall(deposit=15))
    transfer, _ = channel.call(
        "A", "U", TransferCall(recipient="V", amount=10, timeout_height=10, fee=30)
    )
    allocator = RelayerAgent("AL", create_strategy("allocator"))

    txs = allocator.act(channel.chains, now=to_micros(20))
    assert [tx.kind for tx in txs] == ["assign_tasks"]
    assert allocator.observation.view("A").collateral_floor == 5
    assignment = txs[0].payload.assignments[0]
    assert assignment.request_hash == transfer.id
    assert assignment.relayer_id == allocate(transfer.id, [0, 1])

    channel.a.submit_tx(txs[0])
    assert channel.mint("A").results[0].ok
    assert channel.a.coordinator.state.tasks[transfer.id].assignees == [assignment.relayer_id]


def test_allocator_retries_after_stale_relayer_set(make_channel):
    """Test an allocation rejected after R changed is recomputed and resubmitted"""
    channel = make_channel(params=CoordinatorParams(allocation_mode="approach2"))
    for pubkey in ("R1", "R2"):
        channel.call("A", pubkey, RegisterCall(deposit=100))
    transfer, _ = channel.call(
        "A", "U", TransferCall(recipient="V", amount=10, timeout_height=10, fee=30)
    )
    allocator = RelayerAgent("AL", create_strategy("allocator"))

    first = allocator.act(channel.chains, now=to_micros(20))
    chosen = first[0].payload.assignments[0].relayer_id
    assert allocator.act(channel.chains, now=to_micros(21)) == []

    channel.a.submit_tx(channel.tx("A", ("R1", "R2")[chosen], WithdrawCall(), gas_price=2))
    channel.a.submit_tx(first[0])
    block = channel.mint("A")
    assert [result.status for result in block.results] == ["success", "reverted"]
    assert block.results[1].reason == "WrongAllocation"

    retry = allocator.act(channel.chains, now=to_micros(30))
    assert [tx.kind for tx in retry] == ["assign_tasks"]
    assert retry[0].payload.assignments[0].relayer_id == 1 - chosen
    channel.a.submit_tx(retry[0])
    assert channel.mint("A").results[0].ok
    assert channel.a.coordinator.state.tasks[transfer.id].assignees == [1 - chosen]
