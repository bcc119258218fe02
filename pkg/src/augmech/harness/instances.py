"""Instances, JSON I/O and random generators.

Generators take a ``numpy.random.Generator`` and return exact rationals so the
mechanisms can branch on equality; the float samplers at the bottom feed the
lower-bound integrals only.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from ..env import (
    Environment,
    as_vector,
    digital_good,
    env_from_json,
    fraction_str,
    limited_supply,
    symmetric_cap,
)


@dataclass(frozen=True)
class Instance:
    values: tuple[Fraction, ...]
    predictions: tuple[Fraction, ...]
    env: Environment

    def __post_init__(self):
        object.__setattr__(self, "values", as_vector(self.values))
        object.__setattr__(self, "predictions", as_vector(self.predictions))
        if not len(self.values) == len(self.predictions) == self.env.n:
            raise ValueError("values, predictions and environment disagree on n")
        if any(v < 0 for v in self.values + self.predictions):
            raise ValueError("values and predictions must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def wrong(self) -> int:
        return sum(v != p for v, p in zip(self.values, self.predictions))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "values": [fraction_str(v) for v in self.values],
            "predictions": [fraction_str(p) for p in self.predictions],
            "env": self.env.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Instance":
        n = int(data["n"])
        values = as_vector(data["values"])
        preds = as_vector(data.get("predictions", data["values"]))
        return cls(values, preds, env_from_json(data.get("env", {"kind": "digital"}), n))


def load_instance(path: str | Path) -> Instance:
    return Instance.from_json(json.loads(Path(path).read_text()))


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(inst.to_json(), indent=2) + "\n")


# ---------------------------------------------------------------------------
# value generators


def equal_revenue(n: int, rng: np.random.Generator, scale: int = 10**6) -> tuple[Fraction, ...]:
    """``P(v >= x) = 1/x`` on ``[1, scale]``, discretized to ``scale/m``."""
    m = rng.integers(1, scale + 1, size=n)
    return tuple(Fraction(scale, int(k)) for k in m)


def small_integers(n: int, rng: np.random.Generator, high: int = 6) -> tuple[Fraction, ...]:
    """Values in ``1..high``; small ranges make ties common."""
    return tuple(Fraction(int(k)) for k in rng.integers(1, high + 1, size=n))


def small_rationals(n: int, rng: np.random.Generator, high: int = 8, den: int = 4) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(k), den) for k in rng.integers(1, high * den + 1, size=n))


# ---------------------------------------------------------------------------
# prediction error models


def perturb_factor(rng: np.random.Generator, low: Fraction = Fraction(1, 3), high: Fraction = Fraction(3),
                   den: int = 60) -> Fraction:
    """Rational factor drawn uniformly from ``[low, high]`` on a ``1/den`` lattice, never 1."""
    lo, hi = math.ceil(low * den), math.floor(high * den)
    while True:
        k = int(rng.integers(lo, hi + 1))
        if k != den:
            return Fraction(k, den)


def k_wrong(values: Sequence, k: int, rng: np.random.Generator) -> tuple[Fraction, ...]:
    """Predictions equal to ``values`` except on ``k`` random coordinates, each scaled by u in [1/3, 3]."""
    v = list(as_vector(values))
    if not 0 <= k <= len(v):
        raise ValueError("k out of range")
    for idx in rng.choice(len(v), size=k, replace=False):
        if v[idx] == 0:
            v[idx] = Fraction(1)
        else:
            v[idx] = v[idx] * perturb_factor(rng)
    return tuple(v)


def eta_controlled(values: Sequence, eta, rng: np.random.Generator, den: int = 1000) -> tuple[Fraction, ...]:
    """Each prediction is its value times a log-uniform factor in ``[1/eta, eta]``."""
    eta = Fraction(eta)
    if eta < 1:
        raise ValueError("eta must be >= 1")
    out = []
    for v in as_vector(values):
        f = Fraction(math.exp(rng.uniform(-1, 1) * math.log(eta))).limit_denominator(den)
        f = min(max(f, 1 / eta), eta)
        out.append(v * f)
    return tuple(out)


def random_cap(n: int, rng: np.random.Generator, den: int = 4) -> Environment:
    """Random concave cap with ``c(1) = 1``: increments in [0, 1] that never increase."""
    incs = sorted((Fraction(int(k), den) for k in rng.integers(0, den + 1, size=n - 1)), reverse=True)
    cap, total = [Fraction(1)], Fraction(1)
    for d in incs:
        total += d
        cap.append(total)
    return symmetric_cap(cap)


def random_env(kind: str, n: int, rng: np.random.Generator) -> Environment:
    if kind == "digital":
        return digital_good(n)
    if kind == "supply":
        return limited_supply(n, int(rng.integers(2, n + 1)) if n > 2 else 2)
    if kind == "cap":
        return random_cap(n, rng)
    raise ValueError(f"unknown environment kind {kind!r}")


# ---------------------------------------------------------------------------
# lower-bound distributions (floats)


def conditioned_square(N: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size x 2`` draws with density proportional to ``1/(v1^2 v2^2)`` on ``[sqrt N, N]^2``.

    Coordinates are independent; each is sampled by inverting
    ``F(v) = (1/sqrt N - 1/v) / (1/sqrt N - 1/N)``.
    """
    if N <= 1:
        raise ValueError("N must exceed 1")
    a = 1.0 / math.sqrt(N)
    u = rng.random((size, 2))
    return 1.0 / (a - u * (a - 1.0 / N))


def conditioned_square_cdf(x, N: float):
    a = 1.0 / math.sqrt(N)
    x = np.clip(np.asarray(x, dtype=float), math.sqrt(N), N)
    return (a - 1.0 / x) / (a - 1.0 / N)


def two_bidder_gap(N: float, rng: np.random.Generator) -> tuple[tuple[float, float], tuple[float, float]]:
    """Predictions ``(1, N)`` with values drawn from the conditioned square."""
    v = conditioned_square(N, 1, rng)[0]
    return (1.0, float(N)), (float(v[0]), float(v[1]))
