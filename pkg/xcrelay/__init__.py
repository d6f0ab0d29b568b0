"""
xcrelay - a deterministic simulator and Coordinator protocol kernel for
permissionless cross-chain message relaying
"""

__version__ = "0.1.0"

from xcrelay.chain import Chain, CostTable, Ledger
from xcrelay.coordinator import Coordinator, CoordinatorParams, allocate
from xcrelay.metrics import MetricsReport, compare_scalability, compute
from xcrelay.relayer import RelayerAgent, Strategy, create_strategy
from xcrelay.sim import RunTrace, SimConfig, Simulation, load_config, run

__all__ = [
    "Chain",
    "CostTable",
    "Ledger",
    "Coordinator",
    "CoordinatorParams",
    "allocate",
    "RelayerAgent",
    "Strategy",
    "create_strategy",
    "SimConfig",
    "Simulation",
    "RunTrace",
    "load_config",
    "run",
    "MetricsReport",
    "compute",
    "compare_scalability",
]
