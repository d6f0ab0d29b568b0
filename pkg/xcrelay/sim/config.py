"""Simulation configuration

A `SimConfig` is built from nested mappings (a TOML file, a preset, or both
deep-merged), so every field has a default and a partial mapping is enough.
"""

import sys
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from xcrelay.chain.mempool import Ordering
from xcrelay.coordinator.state import CoordinatorParams
from xcrelay.core.costs import CostTable
from xcrelay.core.decorators import STRATEGIES
from xcrelay.core.errors import ConfigError
from xcrelay.relayer.strategies import create_strategy

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

CHAIN_IDS = ("A", "B")


class ChainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    block_interval: float = Field(default=5.0, gt=0)
    max_txs: int = Field(default=100, ge=1)
    ordering: Ordering = "fee_priority"


class ChainsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    A: ChainConfig = Field(default_factory=ChainConfig)
    B: ChainConfig = Field(default_factory=ChainConfig)

    def get(self, chain_id: str) -> ChainConfig:
        return self.A if chain_id == "A" else self.B


class NetworkConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    delay_bound: float = Field(default=0.5, gt=0)
    tick_interval: float = Field(default=1.0, gt=0)


class BurstConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    at: float = Field(ge=0)
    count: int = Field(ge=0)


class WorkloadConfig(BaseModel):
    """User transfers: none, a constant rate, or a burst schedule"""

    model_config = ConfigDict(extra="forbid")

    pattern: Literal["none", "constant", "burst"] = "none"
    rate: float = Field(default=0.0, ge=0)
    start: float = Field(default=0.0, ge=0)
    stop: Optional[float] = Field(default=None, ge=0)
    bursts: List[BurstConfig] = Field(default_factory=list)
    direction: Literal["a_to_b", "b_to_a", "both"] = "a_to_b"
    users: int = Field(default=1, ge=1)
    amount: int = Field(default=10, gt=0)
    fee: int = Field(default=30, ge=0)
    timeout_blocks: int = Field(default=20, ge=1)
    user_balance: int = Field(default=1_000_000, ge=0)

    @model_validator(mode="after")
    def _check_pattern(self) -> "WorkloadConfig":
        if self.pattern == "constant" and self.rate <= 0:
            raise ValueError("a constant workload needs rate > 0")
        if self.pattern == "burst" and not self.bursts:
            raise ValueError("a burst workload needs at least one burst")
        return self

    @property
    def source_chains(self) -> List[str]:
        return {"a_to_b": ["A"], "b_to_a": ["B"], "both": ["A", "B"]}[self.direction]


class AgentConfig(BaseModel):
    """One roster entry; `count` > 1 expands to labels label1..labelN"""

    model_config = ConfigDict(extra="forbid")

    label: str
    strategy: str = "coordinated"
    params: Dict[str, Any] = Field(default_factory=dict)
    count: int = Field(default=1, ge=1)
    collateral: int = Field(default=100, ge=0)
    balance: int = Field(default=10_000, ge=0)

    @field_validator("strategy")
    @classmethod
    def _known_strategy(cls, value: str) -> str:
        if value not in STRATEGIES:
            raise ValueError(f"unknown strategy {value}; choose from {sorted(STRATEGIES)}")
        return value

    @model_validator(mode="after")
    def _check_params(self) -> "AgentConfig":
        create_strategy(self.strategy, self.params)
        return self

    def labels(self) -> List[str]:
        if self.count == 1:
            return [self.label]
        return [f"{self.label}{index}" for index in range(1, self.count + 1)]


class SimConfig(BaseModel):
    """
    Complete description of one run.

    Example:
        config = SimConfig.model_validate({
            "seed": 7,
            "duration": 60,
            "workload": {"pattern": "burst", "bursts": [{"at": 0, "count": 3}]},
            "agents": [{"label": "R", "strategy": "competitive_default", "count": 3}],
            "coordinator": {"allocation_mode": "open"},
        })
    """

    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    duration: float = Field(default=100.0, gt=0)
    chains: ChainsConfig = Field(default_factory=ChainsConfig)
    network: NetworkConfig = Field(default_factory=NetworkConfig)
    workload: WorkloadConfig = Field(default_factory=WorkloadConfig)
    coordinator: CoordinatorParams = Field(default_factory=CoordinatorParams)
    costs: CostTable = Field(default_factory=CostTable)
    agents: List[AgentConfig] = Field(default_factory=list)
    balances: Dict[str, int] = Field(default_factory=dict)
    check_invariants: bool = True

    @model_validator(mode="after")
    def _check_run(self) -> "SimConfig":
        slowest = max(self.chains.A.block_interval, self.chains.B.block_interval)
        if self.duration < 10 * slowest:
            raise ValueError(
                f"duration {self.duration}s covers fewer than 10 blocks of the slower chain "
                f"({slowest}s per block)"
            )
        labels = [label for agent in self.agents for label in agent.labels()]
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        if duplicates:
            raise ValueError(f"duplicate agent labels {duplicates}")
        return self

    def roster(self) -> List[Tuple[str, AgentConfig]]:
        """(label, entry) for every agent after count expansion"""
        return [(label, agent) for agent in self.agents for label in agent.labels()]

    def fingerprint_without_agents(self) -> Dict[str, Any]:
        """Everything except the roster and seed, for comparing runs"""
        return self.model_dump(mode="json", exclude={"agents", "seed"})


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    """Merge `override` into `base` recursively; lists and scalars are replaced"""
    merged: Dict[str, Any] = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def validate_config(data: Mapping[str, Any]) -> SimConfig:
    """
    Validate a mapping into a SimConfig.

    Raises:
        ConfigError: With one diagnostic per invalid field
    """
    try:
        return SimConfig.model_validate(dict(data))
    except ValidationError as exc:
        diagnostics = [
            {
                "field": ".".join(str(part) for part in error["loc"]) or "<root>",
                "message": error["msg"],
            }
            for error in exc.errors()
        ]
        raise ConfigError("Invalid simulation config", diagnostics) from exc


def load_config(path: Union[str, Path], overrides: Optional[Mapping[str, Any]] = None) -> SimConfig:
    """
    Load a TOML config file.

    Raises:
        ConfigError: Missing file, unparseable TOML or invalid fields
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file {path} not found")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"Cannot parse {path}: {exc}") from exc
    return validate_config(deep_merge(data, overrides or {}))
