"""Run traces

A trace is the complete, ordered record of one run: the config, every block
of both chains, the ledger moves each block caused, every transaction an
agent or user sent, and the final balances. It is written as NDJSON, one
record per line, and everything in `xcrelay.metrics` is computed from it.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterator, List, Literal, Optional, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError
from typing_extensions import Annotated

from xcrelay.core.errors import MalformedTrace
from xcrelay.core.hashing import sha256_hex
from xcrelay.core.ledger import LedgerMove, replay
from xcrelay.core.types import Block


class RunRecord(BaseModel):
    kind: Literal["run"] = "run"
    seed: int
    duration: int
    config: Dict[str, Any]
    agents: Dict[str, str] = Field(default_factory=dict)


class BlockRecord(BaseModel):
    kind: Literal["block"] = "block"
    chain: str
    block: Block


class LedgerRecord(BaseModel):
    kind: Literal["ledger"] = "ledger"
    chain: str
    height: int
    moves: List[LedgerMove] = Field(default_factory=list)


class ActionRecord(BaseModel):
    """A transaction sent by an agent (or by the user workload) and its fate at arrival"""

    kind: Literal["action"] = "action"
    at: int
    agent: str
    chain: str
    tx_id: str
    payload: str
    status: Literal["sent", "rejected"] = "sent"
    arrival: Optional[int] = None
    reason: Optional[str] = None


class FinalRecord(BaseModel):
    kind: Literal["final"] = "final"
    at: int
    heights: Dict[str, int]
    balances: Dict[str, Dict[str, int]]


TraceRecord = Annotated[
    Union[RunRecord, BlockRecord, LedgerRecord, ActionRecord, FinalRecord],
    Field(discriminator="kind"),
]
_record_adapter: TypeAdapter = TypeAdapter(TraceRecord)


class RunTrace:
    """Ordered records of one run"""

    def __init__(self, records: Optional[List[TraceRecord]] = None):
        self.records: List[TraceRecord] = list(records or [])

    def add(self, record: TraceRecord) -> None:
        self.records.append(record)

    def filter_by_kind(self, kind: str) -> List[TraceRecord]:
        return [record for record in self.records if record.kind == kind]

    @property
    def run(self) -> RunRecord:
        if not self.records or not isinstance(self.records[0], RunRecord):
            raise MalformedTrace("Trace does not start with a run record")
        return self.records[0]

    @property
    def final(self) -> FinalRecord:
        if not self.records or not isinstance(self.records[-1], FinalRecord):
            raise MalformedTrace("Trace does not end with a final record")
        return self.records[-1]

    def blocks(self, chain: Optional[str] = None) -> List[Block]:
        return [
            record.block
            for record in self.records
            if isinstance(record, BlockRecord) and (chain is None or record.chain == chain)
        ]

    def actions(self, agent: Optional[str] = None) -> List[ActionRecord]:
        return [
            record
            for record in self.records
            if isinstance(record, ActionRecord) and (agent is None or record.agent == agent)
        ]

    def moves(self, chain: str) -> List[LedgerMove]:
        return [
            move
            for record in self.records
            if isinstance(record, LedgerRecord) and record.chain == chain
            for move in record.moves
        ]

    def replay_balances(self) -> Dict[str, Dict[str, int]]:
        """Balances per chain rebuilt from the ledger moves alone (zero entries dropped)"""
        chains = sorted({record.chain for record in self.filter_by_kind("ledger")})
        return {
            chain: {
                location: amount
                for location, amount in sorted(replay(self.moves(chain)).items())
                if amount != 0
            }
            for chain in chains
        }

    def to_ndjson(self) -> str:
        return "".join(
            json.dumps(record.model_dump(mode="json"), separators=(",", ":"))
            + "\n"
            for record in self.records
        )

    def fingerprint(self) -> str:
        """SHA-256 of the NDJSON form; equal for runs that are byte-identical"""
        return sha256_hex(self.to_ndjson().encode("utf-8"))

    @classmethod
    def from_ndjson(cls, text: str) -> "RunTrace":
        """
        Parse a trace.

        Raises:
            MalformedTrace: A line is not JSON, not a known record, or the
                first record is not a run record
        """
        records = []
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                records.append(_record_adapter.validate_python(json.loads(line)))
            except (json.JSONDecodeError, ValidationError) as exc:
                raise MalformedTrace(f"Line {number}: {exc}") from exc
        if not records or not isinstance(records[0], RunRecord):
            raise MalformedTrace("Trace does not start with a run record")
        return cls(records)

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_ndjson(), encoding="utf-8")
        return path

    @classmethod
    def read(cls, path: Union[str, Path]) -> "RunTrace":
        return cls.from_ndjson(Path(path).read_text(encoding="utf-8"))

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, index: int) -> TraceRecord:
        return self.records[index]

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self.records)
