"""The Coordinator contract deployed on each chain

Every entrypoint runs all of its checks before it changes any state. Ledger
movements of a reverted call are undone by the chain's ledger journal, so an
entrypoint that raises leaves the Coordinator exactly as it found it.
"""

import logging
from fractions import Fraction
from math import floor
from typing import Any, List, Optional, Tuple

from xcrelay.coordinator.allocation import allocate_many
from xcrelay.coordinator.dispatch import ContractDispatcher
from xcrelay.coordinator.light_client import LightClient
from xcrelay.coordinator.state import AssignmentResult, CoordinatorParams, CoordinatorState
from xcrelay.core.costs import CostTable
from xcrelay.core.decorators import entrypoint
from xcrelay.core.errors import (
    AlreadyAcked,
    AlreadyAssigned,
    AlreadyRegistered,
    AlreadyResolved,
    ContractRevert,
    DuplicateDelivery,
    EmptyRelayerSet,
    InsufficientBalance,
    InsufficientCollateral,
    InvalidHeader,
    InvalidProof,
    InvalidReceipt,
    InvalidTimeout,
    NotRegistered,
    NotTimedOut,
    NotUnbonding,
    PastTimeout,
    StaleHeader,
    StillUnbonding,
    TaskTimedOut,
    UnknownRequest,
    UnknownTask,
    UnsupportedCall,
    WrongAllocation,
)
from xcrelay.core.hashing import hash_fields
from xcrelay.core.ledger import COLLATERAL, FEE_ESCROW, PRINCIPAL_ESCROW, Ledger
from xcrelay.core.types import (
    Ack,
    Address,
    AssignTasksCall,
    CallContext,
    ChainTx,
    ContractEvent,
    DeliverTxCall,
    PlainCall,
    ProveDeliveryCall,
    Receipt,
    ReclaimCall,
    RegisterCall,
    RelayerId,
    RelayerRecord,
    SlashEntry,
    SlashOutcome,
    SubmitTimeoutCall,
    TaskRecord,
    TransferCall,
    UpdateClientCall,
    WithdrawCall,
)

logger = logging.getLogger(__name__)


def _share(amount: int, fraction: float) -> int:
    return floor(amount * Fraction(str(fraction)))


class Coordinator:
    """
    Relayer membership, escrow, task allocation, delivery verification and
    slashing for one chain of a channel.

    The same contract is the source side for transfers it records and the
    destination side for deliveries from its counterparty.

    Example:
        coordinator = Coordinator("A", Ledger("A"))
        coordinator.link(LightClient(chain_b))
        coordinator.register(ctx, RegisterCall(deposit=100))
    """

    def __init__(
        self,
        chain_id: str,
        ledger: Ledger,
        params: Optional[CoordinatorParams] = None,
        costs: Optional[CostTable] = None,
    ):
        self.chain_id = chain_id
        self.ledger = ledger
        self.costs = costs or CostTable()
        self.state = CoordinatorState(params=params or CoordinatorParams())
        self.light_client: Optional[LightClient] = None
        self.dispatcher = ContractDispatcher(self, name=f"coordinator@{chain_id}")
        self.events: List[ContractEvent] = []

    @property
    def params(self) -> CoordinatorParams:
        return self.state.params

    @property
    def min_profitable_fee(self) -> int:
        if self.params.min_profitable_fee is not None:
            return self.params.min_profitable_fee
        return self.costs.relay_cost()

    def link(self, light_client: LightClient) -> None:
        """Attach the view of the counterparty chain"""
        self.light_client = light_client

    def dispatch(self, tx: ChainTx, height: int, time: int) -> Tuple[Any, List[ContractEvent]]:
        """Execute a transaction's payload and collect the events it emits"""
        ctx = CallContext(tx_id=tx.id, caller=tx.submitter, height=height, time=time)
        self.events = []
        value = self.dispatcher.execute(ctx, tx.payload)
        events, self.events = self.events, []
        return value, events

    def _emit(self, name: str, **data: Any) -> None:
        self.events.append(ContractEvent(name=name, data=data))

    def _counterparty(self) -> LightClient:
        if self.light_client is None:
            raise UnsupportedCall(f"Coordinator on {self.chain_id} has no counterparty")
        return self.light_client

    # Membership

    @entrypoint(kind="plain")
    def plain(self, ctx: CallContext, call: PlainCall) -> None:
        """Plain transaction with no contract effect"""
        return None

    @entrypoint(kind="register")
    def register(self, ctx: CallContext, call: RegisterCall) -> RelayerId:
        """
        Register the caller as a relayer and lock its deposit as collateral.

        Returns:
            The new relayer id

        Raises:
            AlreadyRegistered: The caller is active or unbonding
            InsufficientCollateral: deposit < collateral_required
        """
        existing = self.state.record_for(ctx.caller)
        if existing is not None and existing.status != "retired":
            raise AlreadyRegistered(f"{ctx.caller} is already {existing.status}")
        if call.deposit < self.params.collateral_required:
            raise InsufficientCollateral(
                f"deposit {call.deposit} < required {self.params.collateral_required}"
            )

        self.ledger.move(ctx.caller, COLLATERAL, call.deposit, memo="register")

        relayer_id = self.state.next_relayer_id
        self.state.next_relayer_id += 1
        self.state.all_records[relayer_id] = RelayerRecord(
            pubkey=ctx.caller,
            id=relayer_id,
            collateral=call.deposit,
            initial_collateral=call.deposit,
            registered_at=ctx.height,
        )
        self.state.by_pubkey[ctx.caller] = relayer_id
        self.state.relayers.append(relayer_id)
        self._emit("Registered", relayer_id=relayer_id, pubkey=ctx.caller, deposit=call.deposit)
        logger.debug("%s: registered %s as %d", self.chain_id, ctx.caller, relayer_id)
        return relayer_id

    def unbonding_end(self, relayer_id: RelayerId, now: int) -> int:
        """max(latest pending timeout of the relayer's tasks, now) + k"""
        timeouts = [task.timeout_height for task in self.state.pending_tasks_of(relayer_id)]
        return max(timeouts + [now]) + self.params.unbonding_margin_k

    def _begin_unbonding(self, record: RelayerRecord, now: int, event: str) -> int:
        end = self.unbonding_end(record.id, now)
        record.status = "unbonding"
        record.unbonding_end = end
        self.state.relayers.remove(record.id)
        self._emit(
            event,
            relayer_id=record.id,
            pubkey=record.pubkey,
            end_height=end,
            pending=len(self.state.pending_tasks_of(record.id)),
        )
        return end

    @entrypoint(kind="withdraw")
    def withdraw(self, ctx: CallContext, call: Optional[WithdrawCall] = None) -> int:
        """
        Leave the active set and start unbonding. Pending tasks stay assigned.

        Returns:
            The unbonding end height

        Raises:
            NotRegistered: The caller is not an active relayer
        """
        record = self.state.record_for(ctx.caller)
        if record is None or record.status != "active":
            raise NotRegistered(f"{ctx.caller} is not an active relayer")
        return self._begin_unbonding(record, ctx.height, "Withdrawn")

    @entrypoint(kind="reclaim")
    def reclaim(self, ctx: CallContext, call: Optional[ReclaimCall] = None) -> int:
        """
        Return the remaining collateral once unbonding has ended.

        Raises:
            NotRegistered: Unknown caller
            NotUnbonding: The relayer is not unbonding
            StillUnbonding: now < unbonding end
        """
        record = self.state.record_for(ctx.caller)
        if record is None:
            raise NotRegistered(f"{ctx.caller} never registered")
        if record.status != "unbonding" or record.unbonding_end is None:
            raise NotUnbonding(f"{ctx.caller} is {record.status}")
        if ctx.height < record.unbonding_end:
            raise StillUnbonding(f"unbonding ends at {record.unbonding_end}, now {ctx.height}")

        amount = record.collateral
        self.ledger.move(COLLATERAL, record.pubkey, amount, memo="reclaim")
        record.collateral = 0
        record.status = "retired"
        self._emit("Reclaimed", relayer_id=record.id, pubkey=record.pubkey, amount=amount)
        return amount

    def _partition_relayers(self) -> Tuple[List[RelayerId], List[RelayerRecord]]:
        """Active relayers above the collateral floor, and those at or below it"""
        eligible: List[RelayerId] = []
        below: List[RelayerRecord] = []
        for record in self.state.active_records():
            if record.collateral > self.params.collateral_floor:
                eligible.append(record.id)
            else:
                below.append(record)
        return eligible, below

    def _unbond_below_floor(self, below: List[RelayerRecord], now: int) -> None:
        for record in below:
            self._begin_unbonding(record, now, "AutoUnbonded")

    # Task lifecycle

    @entrypoint(kind="transfer")
    def transfer(self, ctx: CallContext, call: TransferCall) -> TaskRecord:
        """
        Escrow a cross-chain transfer and record its task.

        The request hash is the id of the enclosing transaction.

        Raises:
            InvalidTimeout: timeout_height is not above the relayed destination head
            EmptyRelayerSet: No relayer can take the task
            InsufficientBalance: The sender cannot cover amount + fee
        """
        counterparty = self._counterparty()
        mode = self.params.allocation_mode
        if call.timeout_height <= self.state.counterparty_head:
            raise InvalidTimeout(
                f"timeout {call.timeout_height} <= destination head {self.state.counterparty_head}"
            )
        eligible, below = self._partition_relayers()
        if mode != "open" and not eligible:
            raise EmptyRelayerSet("No active relayer above the collateral floor")
        if self.ledger.balance(ctx.caller) < call.amount + call.fee:
            raise InsufficientBalance(f"{ctx.caller} cannot cover {call.amount} + fee {call.fee}")

        self.ledger.move(ctx.caller, PRINCIPAL_ESCROW, call.amount, memo="escrow principal")
        self.ledger.move(ctx.caller, FEE_ESCROW, call.fee, memo="escrow fee")

        task = TaskRecord(
            request_hash=ctx.tx_id,
            source_chain=self.chain_id,
            dest_chain=counterparty.chain_id,
            origin_user=ctx.caller,
            recipient=call.recipient,
            amount=call.amount,
            fee=call.fee,
            timeout_height=call.timeout_height,
            requested_height=ctx.height,
            requested_time=ctx.time,
            fee_adequate=call.fee >= self.min_profitable_fee,
        )
        self.state.tasks[task.request_hash] = task
        self.state.escrow_total += call.fee
        self.state.principal_escrow += call.amount
        self._emit(
            "TaskCreated",
            request_hash=task.request_hash,
            source_chain=task.source_chain,
            dest_chain=task.dest_chain,
            sender=task.origin_user,
            recipient=task.recipient,
            amount=task.amount,
            fee=task.fee,
            timeout_height=task.timeout_height,
            requested_time=task.requested_time,
            fee_adequate=task.fee_adequate,
        )

        if mode == "approach1":
            self._unbond_below_floor(below, ctx.height)
            assignees = allocate_many(task.request_hash, eligible, self.params.redundancy_r)
            self._assign(task, assignees, ctx)
        return task

    def _assign(self, task: TaskRecord, assignees: List[RelayerId], ctx: CallContext) -> None:
        task.assignees = list(assignees)
        task.assigned = assignees[0]
        task.assigned_height = ctx.height
        task.assigned_time = ctx.time
        self._emit(
            "TaskAssigned",
            request_hash=task.request_hash,
            assignees=list(assignees),
            pubkeys=[self.state.all_records[rid].pubkey for rid in assignees],
            requested_time=task.requested_time,
            assigned_time=ctx.time,
        )

    @entrypoint(kind="assign_tasks")
    def assign_tasks(self, ctx: CallContext, call: AssignTasksCall) -> List[AssignmentResult]:
        """
        Accept externally computed allocations that match allocate(request_hash, R).

        Items are judged independently. The call reverts only if no item is
        accepted; a fully accepted submission earns the allocator reward.
        """
        if self.params.allocation_mode != "approach2":
            raise UnsupportedCall("assign_tasks is only available in approach2 mode")
        eligible, below = self._partition_relayers()

        results: List[AssignmentResult] = []
        accepted: List[Tuple[TaskRecord, List[RelayerId]]] = []
        claimed = set()
        first_error: Optional[ContractRevert] = None
        for item in call.assignments:
            task = self.state.tasks.get(item.request_hash)
            try:
                if task is None:
                    raise UnknownTask(f"unknown task {item.request_hash[:12]}")
                if task.assignees or item.request_hash in claimed:
                    raise AlreadyAssigned(f"task {item.request_hash[:12]} is already assigned")
                if not task.is_open:
                    raise AlreadyResolved(f"task {item.request_hash[:12]} is {task.phase}")
                if not eligible:
                    raise EmptyRelayerSet("No active relayer above the collateral floor")
                expected = allocate_many(item.request_hash, eligible, self.params.redundancy_r)
                if item.relayer_id != expected[0]:
                    raise WrongAllocation(
                        f"task {item.request_hash[:12]}: got {item.relayer_id}, "
                        f"expected {expected[0]}"
                    )
            except ContractRevert as exc:
                first_error = first_error or exc
                results.append(
                    AssignmentResult(
                        request_hash=item.request_hash,
                        relayer_id=item.relayer_id,
                        status="reverted",
                        reason=exc.code,
                    )
                )
                continue
            claimed.add(item.request_hash)
            accepted.append((task, expected))
            results.append(
                AssignmentResult(
                    request_hash=item.request_hash, relayer_id=item.relayer_id, status="accepted"
                )
            )

        if not accepted:
            raise first_error or WrongAllocation("empty assignment list")

        self._unbond_below_floor(below, ctx.height)
        for task, assignees in accepted:
            self._assign(task, assignees, ctx)
        self._emit("AssignTasksResult", results=[result.model_dump() for result in results])
        if len(accepted) == len(results):
            self.ledger.mint(ctx.caller, self.params.allocator_reward, memo="allocator reward")
            self._emit(
                "AllocatorRewarded", allocator=ctx.caller, amount=self.params.allocator_reward
            )
        return results

    def _verified_head(self, header_height: Optional[int]) -> int:
        """Counterparty head after applying an appended header, without committing it"""
        head = self.state.counterparty_head
        if header_height is None or header_height <= head:
            return head
        if not self._counterparty().header_exists(header_height):
            raise InvalidHeader(f"header {header_height} is beyond the counterparty head")
        return header_height

    def _commit_head(self, height: int) -> None:
        if height > self.state.counterparty_head:
            self.state.counterparty_head = height
            self._emit("HeaderRelayed", chain=self._counterparty().chain_id, height=height)

    def relay_header(self, counterparty_height: int) -> int:
        """
        Advance the verified counterparty head.

        Raises:
            StaleHeader: Lower than the current head
            InvalidHeader: The counterparty has no block at that height
        """
        if counterparty_height < self.state.counterparty_head:
            raise StaleHeader(
                f"header {counterparty_height} < head {self.state.counterparty_head}"
            )
        if not self._counterparty().header_exists(counterparty_height):
            raise InvalidHeader(f"header {counterparty_height} is beyond the counterparty head")
        self._commit_head(counterparty_height)
        return self.state.counterparty_head

    @entrypoint(kind="update_client")
    def update_client(self, ctx: CallContext, call: UpdateClientCall) -> int:
        """Relay a counterparty header"""
        return self.relay_header(call.header_height)

    @entrypoint(kind="deliver_tx")
    def deliver_tx(self, ctx: CallContext, call: DeliverTxCall) -> str:
        """
        Execute a request from the counterparty on this (destination) chain.

        Open to any submitter. Mints the amount to the recipient and records
        a receipt.

        Returns:
            The receipt hash

        Raises:
            DuplicateDelivery: The request already has a receipt
            UnknownTask: The counterparty never recorded the request
            UnknownRequest: The request is not visible at source_header_height or differs
            PastTimeout: now > timeout_height
        """
        counterparty = self._counterparty()
        request = call.request
        head = self._verified_head(call.header_height)
        if request.request_hash in self.state.receipts:
            raise DuplicateDelivery(f"request {request.request_hash[:12]} already delivered")
        if request.dest_chain != self.chain_id or request.source_chain != counterparty.chain_id:
            raise UnknownRequest(f"request is not addressed from {counterparty.chain_id}")
        if counterparty.request_task(request.request_hash) is None:
            raise UnknownTask(f"no task {request.request_hash[:12]} on {counterparty.chain_id}")
        if call.source_header_height > head:
            raise UnknownRequest(f"header {call.source_header_height} not relayed (head {head})")
        if counterparty.find_request(request.request_hash, call.source_header_height) != request:
            raise UnknownRequest(f"request {request.request_hash[:12]} does not verify")
        if ctx.height > request.timeout_height:
            raise PastTimeout(f"height {ctx.height} > timeout {request.timeout_height}")

        self._commit_head(head)
        self.ledger.mint(request.recipient, request.amount, memo="deliver")
        receipt = Receipt(
            request_hash=request.request_hash,
            receipt_hash=hash_fields(
                "receipt", self.chain_id, request.request_hash, ctx.height, ctx.caller
            ),
            source_chain=request.source_chain,
            dest_chain=self.chain_id,
            dest_height=ctx.height,
            deliverer=ctx.caller,
        )
        self.state.receipts[request.request_hash] = receipt
        self._emit(
            "Delivered",
            request_hash=request.request_hash,
            receipt_hash=receipt.receipt_hash,
            source_chain=receipt.source_chain,
            dest_height=receipt.dest_height,
            deliverer=receipt.deliverer,
            recipient=request.recipient,
            amount=request.amount,
        )
        return receipt.receipt_hash

    def _payee(self, task: TaskRecord, receipt: Receipt, prover: Address) -> Address:
        if not task.assignees:
            return receipt.deliverer
        for candidate in (receipt.deliverer, prover):
            relayer_id = self.state.by_pubkey.get(candidate)
            if relayer_id is not None and relayer_id in task.assignees:
                return candidate
        return self.state.all_records[task.assignees[0]].pubkey

    @entrypoint(kind="prove_delivery")
    def prove_delivery(self, ctx: CallContext, call: ProveDeliveryCall) -> Ack:
        """
        Acknowledge a delivered task and release its fee.

        The fee goes to the assigned relayer no matter who delivered or proved;
        an unassigned task pays the relayer that delivered it. The escrowed
        principal is burned.

        Raises:
            InvalidReceipt: Unknown task, or the receipt does not verify
            AlreadyAcked: The task was already acknowledged
            TaskTimedOut: The task already timed out
        """
        receipt = call.receipt
        task = self.state.tasks.get(receipt.request_hash)
        if task is None:
            raise InvalidReceipt(f"no task {receipt.request_hash[:12]}")
        if task.phase == "acked":
            raise AlreadyAcked(f"task {task.request_hash[:12]} already acknowledged")
        if task.phase == "timed_out":
            raise TaskTimedOut(f"task {task.request_hash[:12]} timed out")
        head = self._verified_head(call.header_height)
        if (
            receipt.source_chain != self.chain_id
            or receipt.dest_chain != task.dest_chain
            or receipt.dest_height > head
            or self._counterparty().find_receipt(receipt.request_hash, head) != receipt
        ):
            raise InvalidReceipt(f"receipt for {receipt.request_hash[:12]} does not verify")

        payee = self._payee(task, receipt, ctx.caller)
        self._commit_head(head)
        self.ledger.burn(PRINCIPAL_ESCROW, task.amount, memo="complete transfer")
        self.ledger.move(FEE_ESCROW, payee, task.fee, memo="delivery fee")
        self.state.escrow_total -= task.fee
        self.state.principal_escrow -= task.amount
        task.receipt_hash = receipt.receipt_hash
        task.phase = "delivered"
        task.history.append("delivered")
        task.phase = "acked"
        task.history.append("acked")
        self._emit(
            "Acked",
            request_hash=task.request_hash,
            payee=payee,
            fee=task.fee,
            deliverer=receipt.deliverer,
            prover=ctx.caller,
            assignees=list(task.assignees),
            requested_time=task.requested_time,
            acked_time=ctx.time,
        )
        return Ack(
            request_hash=task.request_hash,
            payee=payee,
            fee=task.fee,
            receipt_hash=receipt.receipt_hash,
        )

    @entrypoint(kind="submit_timeout")
    def submit_timeout(self, ctx: CallContext, call: SubmitTimeoutCall) -> SlashOutcome:
        """
        Resolve an undelivered task: slash its assignees, pay the reporter and
        the user their shares, burn the rest, refund principal and fee.

        Raises:
            UnknownTask: No such task
            AlreadyResolved: The task is acknowledged or already timed out
            InvalidProof: The proof does not match the task or the relayed head
            NotTimedOut: The destination holds a receipt for the request
        """
        proof = call.proof
        task = self.state.tasks.get(proof.request_hash)
        if task is None:
            raise UnknownTask(f"no task {proof.request_hash[:12]}")
        if task.phase != "requested":
            raise AlreadyResolved(f"task {task.request_hash[:12]} is {task.phase}")
        head = self._verified_head(call.header_height)
        if (
            proof.timeout_height != task.timeout_height
            or proof.attested_dest_height < proof.timeout_height
            or proof.attested_dest_height > head
        ):
            raise InvalidProof(
                f"proof attests {proof.attested_dest_height} for timeout {proof.timeout_height}, "
                f"task timeout {task.timeout_height}, head {head}"
            )
        if self._counterparty().find_receipt(proof.request_hash) is not None:
            raise NotTimedOut(f"task {task.request_hash[:12]} was delivered")

        self._commit_head(head)
        params = self.params
        slashes: List[SlashEntry] = []
        for relayer_id in task.assignees:
            record = self.state.all_records[relayer_id]
            slashed = min(params.slash_per_timeout, record.collateral)
            reporter_paid = _share(slashed, params.reporter_share)
            user_paid = _share(slashed, params.user_refund_share)
            burned = slashed - reporter_paid - user_paid
            self.ledger.move(COLLATERAL, ctx.caller, reporter_paid, memo="reporter reward")
            self.ledger.move(COLLATERAL, task.origin_user, user_paid, memo="user compensation")
            self.ledger.burn(COLLATERAL, burned, memo="slash")
            record.collateral -= slashed
            record.slashed_total += slashed
            slashes.append(
                SlashEntry(
                    relayer_id=relayer_id,
                    pubkey=record.pubkey,
                    slashed=slashed,
                    reporter_paid=reporter_paid,
                    user_paid=user_paid,
                    burned=burned,
                )
            )

        self.ledger.move(PRINCIPAL_ESCROW, task.origin_user, task.amount, memo="refund principal")
        self.ledger.move(FEE_ESCROW, task.origin_user, task.fee, memo="refund fee")
        self.state.escrow_total -= task.fee
        self.state.principal_escrow -= task.amount
        task.phase = "timed_out"
        task.history.append("timed_out")

        outcome = SlashOutcome(
            request_hash=task.request_hash,
            reporter=ctx.caller,
            slashes=slashes,
            refunded=task.amount + task.fee,
        )
        self._emit(
            "TimedOut",
            request_hash=task.request_hash,
            reporter=ctx.caller,
            origin_user=task.origin_user,
            slashes=[entry.model_dump() for entry in slashes],
            refunded=outcome.refunded,
        )
        logger.debug(
            "%s: task %s timed out, slashed %d",
            self.chain_id,
            task.request_hash[:12],
            outcome.slashed,
        )
        return outcome

    def check_invariants(self) -> List[str]:
        """Violated invariants, as messages (empty when consistent)"""
        state = self.state
        problems: List[str] = []
        open_tasks = [task for task in state.tasks.values() if task.is_open]
        if state.escrow_total != sum(task.fee for task in open_tasks):
            problems.append("escrow_total differs from the fees of open tasks")
        if state.principal_escrow != sum(task.amount for task in open_tasks):
            problems.append("principal_escrow differs from the amounts of open tasks")
        if self.ledger.balance(FEE_ESCROW) != state.escrow_total:
            problems.append("fee escrow bucket differs from escrow_total")
        if self.ledger.balance(PRINCIPAL_ESCROW) != state.principal_escrow:
            problems.append("principal escrow bucket differs from principal_escrow")
        if self.ledger.balance(COLLATERAL) != sum(r.collateral for r in state.all_records.values()):
            problems.append("collateral bucket differs from relayer collateral")
        active = [r.id for r in state.all_records.values() if r.status == "active"]
        if sorted(active) != state.relayers:
            problems.append("active set R differs from the active records")
        if any(r.collateral < 0 for r in state.all_records.values()):
            problems.append("negative collateral")
        for task in state.tasks.values():
            if task.history not in (
                ["requested"],
                ["requested", "delivered", "acked"],
                ["requested", "timed_out"],
            ):
                problems.append(f"task {task.request_hash[:12]} history {task.history}")
        return [f"{self.chain_id}: {problem}" for problem in problems]
