"""Relayer agents and strategies"""

from xcrelay.relayer.agent import AgentState, RelayerAgent
from xcrelay.relayer.base import Strategy, estimate_profit
from xcrelay.relayer.strategies import (
    Abandoner,
    Allocator,
    Competitive,
    CompetitiveDefault,
    CompetitiveOverbid,
    CompetitiveSubsetFirst,
    Coordinated,
    SilentAfterWithdraw,
    TaskThief,
    TimeoutReporter,
    create_strategy,
)
from xcrelay.relayer.view import ChainView, Observation, TaskView

__all__ = [
    "AgentState",
    "RelayerAgent",
    "Strategy",
    "estimate_profit",
    "create_strategy",
    "Competitive",
    "CompetitiveDefault",
    "CompetitiveOverbid",
    "CompetitiveSubsetFirst",
    "Coordinated",
    "TaskThief",
    "Abandoner",
    "SilentAfterWithdraw",
    "TimeoutReporter",
    "Allocator",
    "Observation",
    "ChainView",
    "TaskView",
]
