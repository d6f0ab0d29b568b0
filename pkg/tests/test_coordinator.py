"""Tests for the Coordinator contract"""

from xcrelay.coordinator.allocation import allocate, allocate_many
from xcrelay.coordinator.state import CoordinatorParams
from xcrelay.core.ledger import BURNED, COLLATERAL, FEE_ESCROW, PRINCIPAL_ESCROW
from xcrelay.core.types import (
    MICROS,
    Assignment,
    AssignTasksCall,
    DeliverTxCall,
    ProofOfAbsence,
    ProveDeliveryCall,
    ReclaimCall,
    RegisterCall,
    SubmitTimeoutCall,
    TransferCall,
    UpdateClientCall,
    WithdrawCall,
)

from .conftest import START_BALANCE


def transfer(timeout_height=10, amount=10, fee=30):
    return TransferCall(recipient="V", amount=amount, timeout_height=timeout_height, fee=fee)


def timeout_report(request_hash, timeout_height, attested=None, header=None):
    attested = timeout_height if attested is None else attested
    return SubmitTimeoutCall(
        proof=ProofOfAbsence(
            request_hash=request_hash,
            timeout_height=timeout_height,
            attested_dest_height=attested,
        ),
        header_height=attested if header is None else header,
    )


def event_names(result):
    return [event.name for event in result.events]


def test_register(channel):
    """Test registration locks the deposit and joins the active set"""
    _, result = channel.call("A", "R1", RegisterCall(deposit=100))

    assert result.ok
    assert result.events[0].name == "Registered"
    assert result.events[0].data["relayer_id"] == 0
    state = channel.a.coordinator.state
    assert state.relayers == [0]
    assert state.all_records[0].registered_at == 1
    assert channel.a.balance(COLLATERAL) == 100
    assert channel.a.balance("R1") == START_BALANCE - 10 - 100


def test_register_errors(channel):
    """Test low deposits and double registration revert"""
    _, low = channel.call("A", "R1", RegisterCall(deposit=99))
    assert low.reason == "InsufficientCollateral"

    channel.call("A", "R1", RegisterCall(deposit=100))
    _, again = channel.call("A", "R1", RegisterCall(deposit=100))
    assert again.reason == "AlreadyRegistered"
    assert channel.a.coordinator.state.relayers == [0]
    assert channel.a.balance("R1") == START_BALANCE - 30 - 100


def test_transfer_errors(channel):
    """Test transfers need a future timeout and an eligible relayer"""
    _, result = channel.call("A", "U", transfer())
    assert result.reason == "EmptyRelayerSet"

    channel.call("A", "R1", RegisterCall(deposit=100))
    _, result = channel.call("A", "U", transfer(timeout_height=0))
    assert result.reason == "InvalidTimeout"
    assert channel.a.coordinator.state.tasks == {}


def test_transfer_rollback_on_insufficient_balance(make_channel):
    """Test a transfer the sender cannot cover leaves only the gas charge"""
    channel = make_channel(params=CoordinatorParams(allocation_mode="open"), balances={"poor": 15})
    _, result = channel.call("A", "poor", transfer())

    assert result.reason == "InsufficientBalance"
    assert channel.a.balance("poor") == 5
    assert channel.a.balance(FEE_ESCROW) == 0
    assert channel.a.balance(PRINCIPAL_ESCROW) == 0
    assert channel.a.coordinator.state.tasks == {}


def test_full_lifecycle(channel):
    """Test transfer, delivery and acknowledgement move every token where it belongs"""
    channel.call("A", "R1", RegisterCall(deposit=100))
    tx, result = channel.call("A", "U", transfer())

    assert event_names(result) == ["TaskCreated", "TaskAssigned"]
    assert result.events[1].data["pubkeys"] == ["R1"]
    task = channel.a.coordinator.state.tasks[tx.id]
    assert task.assignees == [0]
    assert task.fee_adequate
    assert channel.a.balance("U") == START_BALANCE - 10 - 10 - 30

    deliver = DeliverTxCall(request=task.request_data(), source_header_height=2, header_height=2)
    _, result = channel.call("B", "R1", deliver)
    assert result.ok
    receipt = channel.b.coordinator.state.receipts[tx.id]
    assert receipt.deliverer == "R1"
    assert receipt.dest_height == 1
    assert channel.b.balance("V") == START_BALANCE + 10
    assert channel.b.coordinator.state.counterparty_head == 2

    _, result = channel.call("A", "R1", ProveDeliveryCall(receipt=receipt, header_height=1))
    assert result.ok
    acked = result.events[-1]
    assert acked.name == "Acked"
    assert acked.data["payee"] == "R1"
    assert task.phase == "acked"
    assert task.history == ["requested", "delivered", "acked"]
    assert channel.a.balance("R1") == START_BALANCE - 10 - 100 - 10 + 30
    assert channel.a.balance(BURNED) == 10
    assert channel.a.coordinator.state.escrow_total == 0

    _, again = channel.call("A", "R1", ProveDeliveryCall(receipt=receipt, header_height=1))
    assert again.reason == "AlreadyAcked"
    _, duplicate = channel.call("B", "R2", deliver)
    assert duplicate.reason == "DuplicateDelivery"
    assert channel.a.coordinator.check_invariants() == []


def test_fee_goes_to_assignee(channel):
    """Test a relayer that delivers someone else's task only pays gas"""
    channel.call("A", "R1", RegisterCall(deposit=100))
    channel.call("A", "R2", RegisterCall(deposit=100))
    tx, _ = channel.call("A", "U", transfer())
    state = channel.a.coordinator.state
    task = state.tasks[tx.id]
    owner = state.all_records[task.assigned].pubkey
    thief = "R2" if owner == "R1" else "R1"
    before = channel.a.balance(thief)

    channel.call(
        "B",
        thief,
        DeliverTxCall(request=task.request_data(), source_header_height=3, header_height=3),
    )
    receipt = channel.b.coordinator.state.receipts[tx.id]
    _, result = channel.call("A", thief, ProveDeliveryCall(receipt=receipt, header_height=1))

    assert result.events[-1].data["payee"] == owner
    assert channel.a.balance(thief) == before - 10


def test_open_mode_pays_deliverer(make_channel):
    """Test unassigned tasks pay the relayer that delivered"""
    channel = make_channel(params=CoordinatorParams(allocation_mode="open"))
    tx, result = channel.call("A", "U", transfer())
    assert event_names(result) == ["TaskCreated"]

    task = channel.a.coordinator.state.tasks[tx.id]
    deliver = DeliverTxCall(request=task.request_data(), source_header_height=1, header_height=1)
    channel.call("B", "R2", deliver)
    receipt = channel.b.coordinator.state.receipts[tx.id]
    _, result = channel.call("A", "R3", ProveDeliveryCall(receipt=receipt, header_height=1))

    assert result.events[-1].data["payee"] == "R2"
    assert channel.a.balance("R2") == START_BALANCE + 30


def test_deliver_errors(channel):
    """Test deliveries against unrelayed headers, bad headers and past timeouts"""
    channel.call("A", "R1", RegisterCall(deposit=100))
    tx, _ = channel.call("A", "U", transfer(timeout_height=1))
    request = channel.a.coordinator.state.tasks[tx.id].request_data()

    _, unrelayed = channel.call("B", "R1", DeliverTxCall(request=request, source_header_height=2))
    assert unrelayed.reason == "UnknownRequest"
    _, beyond = channel.call(
        "B", "R1", DeliverTxCall(request=request, source_header_height=2, header_height=5)
    )
    assert beyond.reason == "InvalidHeader"
    _, late = channel.call(
        "B", "R1", DeliverTxCall(request=request, source_header_height=2, header_height=2)
    )
    assert late.reason == "PastTimeout"
    assert channel.b.coordinator.state.receipts == {}


def test_timeout_slashes_and_refunds(channel):
    """Test a timed-out task slashes its relayer and refunds the user"""
    channel.call("A", "R1", RegisterCall(deposit=100))
    tx, _ = channel.call("A", "U", transfer(timeout_height=2))
    channel.mint("B", 2)

    _, result = channel.call("A", "W", timeout_report(tx.id, 2))
    assert result.ok
    timed_out = result.events[-1]
    assert timed_out.name == "TimedOut"
    assert timed_out.data["slashes"] == [
        {
            "relayer_id": 0,
            "pubkey": "R1",
            "slashed": 10,
            "reporter_paid": 5,
            "user_paid": 4,
            "burned": 1,
        }
    ]
    assert timed_out.data["refunded"] == 40
    assert channel.a.balance("W") == START_BALANCE - 10 + 5
    assert channel.a.balance("U") == START_BALANCE - 10 + 4
    record = channel.a.coordinator.state.all_records[0]
    assert record.collateral == 90
    assert record.slashed_total == 10
    assert channel.a.balance(COLLATERAL) == 90

    _, late = channel.call("A", "W", timeout_report(tx.id, 2))
    assert late.reason == "AlreadyResolved"


def test_timeout_split_rounds_down(make_channel):
    """Test reporter and user shares are floored and the remainder burned"""
    params = CoordinatorParams(slash_per_timeout=7, reporter_share=0.3, user_refund_share=0.3)
    channel = make_channel(params=params)
    channel.call("A", "R1", RegisterCall(deposit=100))
    tx, _ = channel.call("A", "U", transfer(timeout_height=1))
    channel.mint("B")

    _, result = channel.call("A", "W", timeout_report(tx.id, 1))
    entry = result.events[-1].data["slashes"][0]
    split = [entry[key] for key in ("slashed", "reporter_paid", "user_paid", "burned")]
    assert split == [7, 2, 2, 3]


def test_premature_timeout(channel):
    """Test reports before the destination reaches the timeout height"""
    channel.call("A", "R1", RegisterCall(deposit=100))
    tx, _ = channel.call("A", "U", transfer(timeout_height=2))
    channel.mint("B")

    _, early = channel.call("A", "W", timeout_report(tx.id, 2, attested=1))
    assert early.reason == "InvalidProof"
    _, unknown_header = channel.call("A", "W", timeout_report(tx.id, 2))
    assert unknown_header.reason == "InvalidHeader"
    assert channel.a.coordinator.state.tasks[tx.id].phase == "requested"


def test_timeout_of_delivered_task(channel):
    """Test a delivered task cannot be reported"""
    channel.call("A", "R1", RegisterCall(deposit=100))
    tx, _ = channel.call("A", "U", transfer(timeout_height=2))
    request = channel.a.coordinator.state.tasks[tx.id].request_data()
    channel.call(
        "B", "R1", DeliverTxCall(request=request, source_header_height=2, header_height=2)
    )
    channel.mint("B")

    _, result = channel.call("A", "W", timeout_report(tx.id, 2))
    assert result.reason == "NotTimedOut"
    assert channel.a.coordinator.state.all_records[0].collateral == 100


def test_withdraw_and_reclaim(channel):
    """Test unbonding lasts past the latest pending timeout plus the margin"""
    channel.call("A", "R1", RegisterCall(deposit=100))
    _, early = channel.call("A", "R1", ReclaimCall())
    assert early.reason == "NotUnbonding"
    channel.call("A", "U", transfer(timeout_height=8))

    _, result = channel.call("A", "R1", WithdrawCall())
    withdrawn = result.events[0]
    assert withdrawn.name == "Withdrawn"
    assert withdrawn.data["end_height"] == 8 + 5
    assert withdrawn.data["pending"] == 1
    assert channel.a.coordinator.state.relayers == []

    _, result = channel.call("A", "R1", ReclaimCall())
    assert result.reason == "StillUnbonding"
    channel.mint("A", 7)
    assert channel.a.height == 12
    _, result = channel.call("A", "R1", ReclaimCall())
    assert result.ok
    assert result.events[0].data["amount"] == 100
    assert channel.a.coordinator.state.all_records[0].status == "retired"
    assert channel.a.balance(COLLATERAL) == 0

    _, again = channel.call("A", "R1", RegisterCall(deposit=100))
    assert again.ok
    assert again.events[0].data["relayer_id"] == 1


def test_withdraw_requires_registration(channel):
    """Test unknown relayers cannot withdraw or reclaim"""
    _, withdraw = channel.call("A", "R2", WithdrawCall())
    _, reclaim = channel.call("A", "R2", ReclaimCall())
    assert withdraw.reason == "NotRegistered"
    assert reclaim.reason == "NotRegistered"


def test_auto_unbond_below_floor(make_channel):
    """Test a relayer slashed to the floor is unbonded at the next allocation"""
    channel = make_channel(params=CoordinatorParams(collateral_required=25, collateral_floor=20))
    channel.call("A", "R1", RegisterCall(deposit=25))
    tx, _ = channel.call("A", "U", transfer(timeout_height=2))
    channel.mint("B", 2)
    channel.call("A", "W", timeout_report(tx.id, 2))
    assert channel.a.coordinator.state.all_records[0].collateral == 15

    _, result = channel.call("A", "U", transfer())
    assert result.reason == "EmptyRelayerSet"
    assert channel.a.coordinator.state.relayers == [0]

    channel.call("A", "R2", RegisterCall(deposit=100))
    _, result = channel.call("A", "U", transfer())
    assert event_names(result) == ["TaskCreated", "AutoUnbonded", "TaskAssigned"]
    assert result.events[2].data["assignees"] == [1]
    assert channel.a.coordinator.state.all_records[0].status == "unbonding"
    assert channel.a.coordinator.state.relayers == [1]


def test_redundant_assignment(make_channel):
    """Test redundancy assigns consecutive relayers and slashes each of them"""
    channel = make_channel(params=CoordinatorParams(redundancy_r=2))
    for relayer in ("R1", "R2", "R3"):
        channel.call("A", relayer, RegisterCall(deposit=100))
    tx, _ = channel.call("A", "U", transfer(timeout_height=1))
    task = channel.a.coordinator.state.tasks[tx.id]
    assert task.assignees == allocate_many(tx.id, [0, 1, 2], 2)

    channel.mint("B")
    _, result = channel.call("A", "W", timeout_report(tx.id, 1))
    slashed = [entry["relayer_id"] for entry in result.events[-1].data["slashes"]]
    assert slashed == task.assignees


def test_assign_tasks(make_channel):
    """Test watcher-submitted allocations must match the on-chain rule"""
    channel = make_channel(params=CoordinatorParams(allocation_mode="approach2"))
    channel.call("A", "R1", RegisterCall(deposit=100))
    channel.call("A", "R2", RegisterCall(deposit=100))
    tx, result = channel.call("A", "U", transfer())
    assert event_names(result) == ["TaskCreated"]
    task = channel.a.coordinator.state.tasks[tx.id]
    assert task.assignees == []

    expected = allocate(tx.id, [0, 1])
    wrong = AssignTasksCall(assignments=[Assignment(request_hash=tx.id, relayer_id=1 - expected)])
    _, result = channel.call("A", "AL", wrong)
    assert result.reason == "WrongAllocation"

    right = AssignTasksCall(assignments=[Assignment(request_hash=tx.id, relayer_id=expected)])
    _, result = channel.call("A", "AL", right)
    assert event_names(result) == ["TaskAssigned", "AssignTasksResult", "AllocatorRewarded"]
    assert task.assignees == [expected]
    assert task.assigned_time - task.requested_time == 10 * MICROS
    assert channel.a.balance("AL") == START_BALANCE - 20 + 15


def test_assign_tasks_partial(make_channel):
    """Test a partially accepted submission earns no allocator reward"""
    channel = make_channel(params=CoordinatorParams(allocation_mode="approach2"))
    channel.call("A", "R1", RegisterCall(deposit=100))
    first, _ = channel.call("A", "U", transfer())
    second, _ = channel.call("A", "U", transfer())
    channel.call(
        "A",
        "AL",
        AssignTasksCall(assignments=[Assignment(request_hash=first.id, relayer_id=0)]),
    )

    batch = AssignTasksCall(
        assignments=[
            Assignment(request_hash=second.id, relayer_id=0),
            Assignment(request_hash=first.id, relayer_id=0),
        ]
    )
    _, result = channel.call("A", "AL", batch)
    assert result.ok
    assert "AllocatorRewarded" not in event_names(result)
    statuses = [item["status"] for item in result.events[-1].data["results"]]
    reasons = [item["reason"] for item in result.events[-1].data["results"]]
    assert statuses == ["accepted", "reverted"]
    assert reasons == [None, "AlreadyAssigned"]


def test_assign_tasks_outside_approach2(channel):
    """Test assign_tasks is refused in approach1 mode"""
    channel.call("A", "R1", RegisterCall(deposit=100))
    tx, _ = channel.call("A", "U", transfer())
    call = AssignTasksCall(assignments=[Assignment(request_hash=tx.id, relayer_id=0)])
    _, result = channel.call("A", "AL", call)
    assert result.reason == "UnsupportedCall"


def test_update_client(channel):
    """Test relaying counterparty headers"""
    channel.mint("B", 2)
    _, result = channel.call("A", "W", UpdateClientCall(header_height=2))
    assert result.ok
    assert channel.a.coordinator.state.counterparty_head == 2

    _, stale = channel.call("A", "W", UpdateClientCall(header_height=1))
    _, invalid = channel.call("A", "W", UpdateClientCall(header_height=3))
    assert stale.reason == "StaleHeader"
    assert invalid.reason == "InvalidHeader"


def test_deliver_accepted_once_header_relayed(channel):
    """Test a delivery rejected for an unrelayed header succeeds after the header lands"""
    channel.call("A", "R1", RegisterCall(deposit=100))
    tx, _ = channel.call("A", "U", transfer())
    request = channel.a.coordinator.state.tasks[tx.id].request_data()
    delivery = DeliverTxCall(request=request, source_header_height=2)

    _, early = channel.call("B", "R1", delivery)
    assert early.reason == "UnknownRequest"
    assert tx.id not in channel.b.coordinator.state.receipts

    _, relayed = channel.call("B", "W", UpdateClientCall(header_height=2))
    assert relayed.ok
    _, accepted = channel.call("B", "R1", delivery)
    assert accepted.ok
    assert "Delivered" in event_names(accepted)
    assert channel.b.coordinator.state.receipts[tx.id].deliverer == "R1"
