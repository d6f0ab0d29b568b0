"""Named scenario presets

A preset is a partial config deep-merged over `SimConfig` defaults. Presets
that compare several runs expand into labelled variants.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from xcrelay.sim.config import deep_merge

Overrides = Dict[str, Any]

DEFAULT_RELAYER_COUNTS = (1, 2, 4, 8)

_CONTESTED_BURST: Overrides = {
    "duration": 60.0,
    "chains": {"A": {"block_interval": 5.0}, "B": {"block_interval": 5.0}},
    "network": {"delay_bound": 0.5},
    "workload": {
        "pattern": "burst",
        "bursts": [{"at": 0.0, "count": 3}],
        "fee": 30,
        "timeout_blocks": 10,
        "users": 1,
    },
    "coordinator": {"allocation_mode": "open"},
}


def _competitor(label: str, strategy: str = "competitive_default", **params: Any) -> Overrides:
    return {"label": label, "strategy": strategy, "params": params}


class ScenarioPreset(BaseModel):
    """A named experiment: base overrides plus labelled variants"""

    name: str
    description: str
    overrides: Overrides = Field(default_factory=dict)
    variants: Dict[str, Overrides] = Field(default_factory=dict)

    def expand(
        self,
        seed: int,
        relayer_counts: Optional[Sequence[int]] = None,
        allocation: Optional[str] = None,
    ) -> List[Tuple[str, Overrides]]:
        """(label, full override mapping) for every run of the preset"""
        variants = self.variants or {self.name: {}}
        if self.name == "scalability":
            variants = scalability_variants(relayer_counts or DEFAULT_RELAYER_COUNTS)
        runs = []
        for label, variant in variants.items():
            config = deep_merge(deep_merge(self.overrides, variant), {"seed": seed})
            if allocation is not None and "allocation_mode" not in variant.get("coordinator", {}):
                config = deep_merge(config, {"coordinator": {"allocation_mode": allocation}})
            runs.append((label, config))
        return runs


def scalability_variants(counts: Sequence[int]) -> Dict[str, Overrides]:
    """A coordinated and a competitive run per relayer count"""
    variants: Dict[str, Overrides] = {}
    for n in counts:
        variants[f"coordinated-{n}"] = {
            "coordinator": {"allocation_mode": "approach1"},
            "agents": [
                {
                    "label": "C",
                    "strategy": "coordinated",
                    "count": n,
                    "balance": 100_000,
                    "params": {"scan_latency": 1.0, "max_tasks_per_tick": 5},
                }
            ],
        }
    for n in counts:
        variants[f"competitive-{n}"] = {
            "coordinator": {"allocation_mode": "open"},
            "agents": [
                {
                    "label": "K",
                    "strategy": "competitive_default",
                    "count": n,
                    "balance": 100_000,
                    "params": {"scan_latency": 1.0, "max_tasks_per_tick": 5},
                }
            ],
        }
    return variants


PRESETS: Dict[str, ScenarioPreset] = {
    preset.name: preset
    for preset in [
        ScenarioPreset(
            name="scenario1",
            description="Three identical competitive relayers race for three tasks",
            overrides=deep_merge(
                _CONTESTED_BURST,
                {"agents": [_competitor(label) for label in ("R1", "R2", "R3")]},
            ),
        ),
        ScenarioPreset(
            name="scenario2",
            description="One relayer pays a higher gas price to win every race",
            overrides=deep_merge(
                _CONTESTED_BURST,
                {
                    "agents": [
                        _competitor("R1"),
                        _competitor("R2"),
                        _competitor("R3", "competitive_overbid", premium=1),
                    ]
                },
            ),
        ),
        ScenarioPreset(
            name="scenario3",
            description="One relayer scans a subset first and lands its deliveries a block early",
            overrides=deep_merge(
                _CONTESTED_BURST,
                {
                    "agents": [
                        _competitor("R1", scan_latency=2.0),
                        _competitor("R2", scan_latency=2.0),
                        _competitor("R3", "competitive_subset_first", scan_latency=2.0, batch=2),
                    ]
                },
            ),
        ),
        ScenarioPreset(
            name="scalability",
            description="Throughput against relayer count, coordinated and competitive",
            overrides={
                "duration": 200.0,
                "chains": {"A": {"max_txs": 1000}, "B": {"max_txs": 1000}},
                "workload": {
                    "pattern": "constant",
                    "rate": 12.0,
                    "start": 1.0,
                    "timeout_blocks": 100,
                    "users": 10,
                },
            },
        ),
        ScenarioPreset(
            name="fairness",
            description="Allocation of 10,000 tasks over four coordinated relayers",
            overrides={
                "duration": 50.0,
                "chains": {"A": {"max_txs": 20_000}},
                "workload": {
                    "pattern": "burst",
                    "bursts": [{"at": 1.0, "count": 10_000}],
                    "users": 10,
                    "timeout_blocks": 40,
                },
                "coordinator": {"allocation_mode": "approach1"},
                "agents": [
                    {
                        "label": "C",
                        "strategy": "coordinated",
                        "count": 4,
                        "params": {"max_tasks_per_tick": 5},
                    }
                ],
            },
        ),
        ScenarioPreset(
            name="accountability",
            description="Slashing of inactive relayers and the economics of task theft",
            overrides={"coordinator": {"allocation_mode": "approach1"}},
            variants={
                "slashing": {
                    "duration": 150.0,
                    "workload": {
                        "pattern": "constant",
                        "rate": 0.5,
                        "stop": 60.0,
                        "timeout_blocks": 6,
                        "users": 2,
                    },
                    "agents": [
                        {"label": "C", "strategy": "coordinated", "count": 2},
                        {
                            "label": "S",
                            "strategy": "silent_after_withdraw",
                            "collateral": 1000,
                            "params": {"withdraw_at": 30.0},
                        },
                        {
                            "label": "X",
                            "strategy": "abandoner",
                            "collateral": 1000,
                            "params": {"deliver": False},
                        },
                        {"label": "W", "strategy": "timeout_reporter", "count": 2},
                    ],
                },
                "theft": {
                    "duration": 100.0,
                    "workload": {"pattern": "constant", "rate": 0.2, "stop": 60.0},
                    "agents": [
                        {"label": "C", "strategy": "coordinated", "count": 3},
                        {"label": "T", "strategy": "task_thief", "params": {"scan_latency": 0.5}},
                    ],
                },
            },
        ),
        ScenarioPreset(
            name="approach2-delay",
            description="Assignment delay of watcher-submitted allocations against on-chain ones",
            overrides={
                "duration": 100.0,
                "chains": {"A": {"block_interval": 10.0}, "B": {"block_interval": 10.0}},
                "workload": {"pattern": "constant", "rate": 0.2, "start": 1.0, "stop": 80.0},
                "agents": [
                    {"label": "C", "strategy": "coordinated", "count": 3},
                    {"label": "AL", "strategy": "allocator"},
                ],
            },
            variants={
                "approach2": {"coordinator": {"allocation_mode": "approach2"}},
                "approach1": {"coordinator": {"allocation_mode": "approach1"}},
            },
        ),
    ]
}


def get_preset(name: str) -> ScenarioPreset:
    """
    Raises:
        KeyError: Unknown preset name
    """
    if name not in PRESETS:
        raise KeyError(f"Unknown scenario {name}; choose from {sorted(PRESETS)}")
    return PRESETS[name]
