"""Uniformity of task allocation"""

from typing import Dict, List, Sequence, Union

from pydantic import BaseModel
from scipy.stats import chisquare

from xcrelay.coordinator.allocation import allocation_index
from xcrelay.core.hashing import hash_fields


class FairnessResult(BaseModel):
    counts: List[int]
    expected: float
    max_relative_deviation: float
    chi2: float
    p_value: float
    alpha: float
    uniform: bool


def fairness_test(
    counts: Union[Sequence[int], Dict[str, int]], alpha: float = 0.01
) -> FairnessResult:
    """
    Chi-square goodness of fit of assignment counts against the uniform
    distribution. `uniform` is True when p > alpha.
    """
    values = list(counts.values()) if isinstance(counts, dict) else list(counts)
    if len(values) < 2:
        raise ValueError("Need counts for at least two relayers")
    total = sum(values)
    if total == 0:
        raise ValueError("No assignments to test")
    expected = total / len(values)
    statistic, p_value = chisquare(values)
    return FairnessResult(
        counts=values,
        expected=expected,
        max_relative_deviation=max(abs(value - expected) for value in values) / expected,
        chi2=float(statistic),
        p_value=float(p_value),
        alpha=alpha,
        uniform=bool(p_value > alpha),
    )


def task_hashes(seed: int, tasks: int) -> List[str]:
    """Pseudo-random request hashes, reproducible from the seed"""
    return [hash_fields("fairness", seed, index) for index in range(tasks)]


def allocation_experiment(seed: int, tasks: int = 10_000, m: int = 4) -> List[int]:
    """How many of `tasks` random requests each of m relayers is assigned"""
    counts = [0] * m
    for request_hash in task_hashes(seed, tasks):
        counts[allocation_index(request_hash, m)] += 1
    return counts
