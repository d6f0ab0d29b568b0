"""Discrete-event simulation of two chains, their relayers and users"""

from xcrelay.sim.config import (
    AgentConfig,
    BurstConfig,
    ChainConfig,
    ChainsConfig,
    NetworkConfig,
    SimConfig,
    WorkloadConfig,
    deep_merge,
    load_config,
    validate_config,
)
from xcrelay.sim.engine import Simulation, run
from xcrelay.sim.events import EventQueue, SimEvent
from xcrelay.sim.trace import (
    ActionRecord,
    BlockRecord,
    FinalRecord,
    LedgerRecord,
    RunRecord,
    RunTrace,
)
from xcrelay.sim.workload import WorkloadGenerator

__all__ = [
    "AgentConfig",
    "BurstConfig",
    "ChainConfig",
    "ChainsConfig",
    "NetworkConfig",
    "SimConfig",
    "WorkloadConfig",
    "deep_merge",
    "load_config",
    "validate_config",
    "Simulation",
    "run",
    "EventQueue",
    "SimEvent",
    "RunTrace",
    "RunRecord",
    "BlockRecord",
    "LedgerRecord",
    "ActionRecord",
    "FinalRecord",
    "WorkloadGenerator",
]
