"""Closed forms from the two-bidder lower-bound construction, plus a sampling cross-check."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .instances import conditioned_square


@dataclass(frozen=True)
class LowerBound:
    N: float
    alpha: float
    benchmark_mean: float
    revenue_upper: float
    ratio_bound: float
    limit_bound: float


def benchmark_mean(N: float) -> float:
    """``E[F2]`` for two bidders drawn from the conditioned square."""
    s = math.sqrt(N)
    return 4 * N / (s - 1) - 2 * N * math.log(N) / (s - 1) ** 2


def revenue_upper(N: float, alpha: float) -> float:
    s = math.sqrt(N)
    return (N / (s - 1)) * (2 - 1 / s - 2 / alpha + 2 / (alpha * s))


def ratio_bound(N: float, alpha: float) -> float:
    s = math.sqrt(N)
    return 4 / (2 - 2 / alpha - (1 / s) * (1 - 2 / alpha))


def limit_bound(N: float) -> float:
    s = math.sqrt(N)
    return (3 - 1 / s) / (1 - 1 / (2 * s))


def lower_bound_formulas(N: float, alpha: float) -> LowerBound:
    if N <= 1:
        raise ValueError("N must exceed 1")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return LowerBound(N, alpha, benchmark_mean(N), revenue_upper(N, alpha), ratio_bound(N, alpha), limit_bound(N))


def mc_verify_benchmark_mean(N: float, samples: int, rng: np.random.Generator | None = None,
                             batch: int = 1 << 18) -> float:
    """Sample mean of ``F2 = 2 min(v1, v2)`` over the conditioned square."""
    if samples < 10**4:
        raise ValueError("use at least 10^4 samples")
    rng = rng or np.random.default_rng(0)
    total, left = 0.0, samples
    while left:
        m = min(batch, left)
        v = conditioned_square(N, m, rng)
        total += float((2 * v.min(axis=1)).sum())
        left -= m
    return total / samples
