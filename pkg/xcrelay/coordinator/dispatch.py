"""Routing of transaction payloads to contract entrypoints"""

from typing import Any, Callable, Dict, List

from xcrelay.core.errors import UnsupportedCall
from xcrelay.core.types import CallContext, Payload


class ContractDispatcher:
    """
    Maps payload kinds to the `@entrypoint` methods of a contract.

    Example:
        dispatcher = ContractDispatcher(coordinator)
        dispatcher.execute(ctx, RegisterCall(deposit=100))
    """

    def __init__(self, contract: Any, name: str = "coordinator"):
        self.name = name
        self.entrypoints: Dict[str, Callable[..., Any]] = {}
        self.descriptions: Dict[str, str] = {}

        for attr in dir(type(contract)):
            member = getattr(type(contract), attr, None)
            kind = getattr(member, "_entrypoint_kind", None)
            if kind is None:
                continue
            self.entrypoints[kind] = getattr(contract, attr)
            self.descriptions[kind] = member._entrypoint_description

    def supports(self, kind: str) -> bool:
        return kind in self.entrypoints

    def execute(self, ctx: CallContext, payload: Payload) -> Any:
        """Execute the entrypoint registered for the payload's kind"""
        if payload.kind not in self.entrypoints:
            raise UnsupportedCall(f"{self.name} has no entrypoint for {payload.kind}")
        return self.entrypoints[payload.kind](ctx, payload)

    def list_entrypoints(self) -> List[Dict[str, str]]:
        """List all entrypoints with their descriptions"""
        return [
            {"kind": kind, "description": self.descriptions[kind].splitlines()[0]}
            for kind in sorted(self.entrypoints)
        ]
