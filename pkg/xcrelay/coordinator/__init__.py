"""Coordinator contract: membership, allocation, verification and slashing"""

from xcrelay.coordinator.allocation import allocate, allocate_many, allocation_index
from xcrelay.coordinator.contract import Coordinator
from xcrelay.coordinator.dispatch import ContractDispatcher
from xcrelay.coordinator.light_client import LightClient
from xcrelay.coordinator.state import (
    AllocationMode,
    AssignmentResult,
    CoordinatorParams,
    CoordinatorState,
)

__all__ = [
    "Coordinator",
    "CoordinatorParams",
    "CoordinatorState",
    "AllocationMode",
    "AssignmentResult",
    "ContractDispatcher",
    "LightClient",
    "allocate",
    "allocate_many",
    "allocation_index",
]
