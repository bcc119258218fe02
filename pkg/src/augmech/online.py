"""Online sampling auction with predictions over an arrival order.

Bidders arrive one at a time.  The first arrival is offered its predicted
value; each later arrival ``t`` receives the rule that an offline mechanism
built for the ``t`` bidders seen so far would give it, using the earlier
bids and the predictions of all ``t`` bidders.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Sequence

import numpy as np

from .augmented import digital_good_augmented
from .baseline import rscs
from .env import ONE, as_vector
from .mechanism import Mechanism, StepRule, merge_rules

OfflineFactory = Callable[[tuple[Fraction, ...]], Mechanism]


def default_offline(predictions: tuple[Fraction, ...]) -> Mechanism:
    return digital_good_augmented(predictions, rscs())


@dataclass(frozen=True)
class ArrivalOrder:
    """A fixed permutation, or ``None`` to draw a uniformly random one per run."""

    pi: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.pi is not None and sorted(self.pi) != list(range(len(self.pi))):
            raise ValueError(f"{self.pi} is not a permutation")

    @property
    def random(self) -> bool:
        return self.pi is None

    def draw(self, n: int, rng: np.random.Generator) -> tuple[int, ...]:
        if self.pi is None:
            return tuple(int(k) for k in rng.permutation(n))
        if len(self.pi) != n:
            raise ValueError("arrival order has the wrong length")
        return self.pi


class OSAP(Mechanism):
    """Realizations are ``(order, step_realizations)``; step ``t`` uses the offline ``t``-bidder mechanism."""

    def __init__(self, predictions: Sequence, offline: OfflineFactory = default_offline,
                 order: ArrivalOrder | None = None):
        self.predictions = as_vector(predictions)
        self.offline = offline
        self.order = order or ArrivalOrder()
        self.name = "osap"
        self._cache: dict[tuple[int, ...], Mechanism] = {}
        probe = offline(self.predictions[:2]) if len(self.predictions) >= 2 else None
        alpha = getattr(probe, "declared_alpha", None)
        self.declared_alpha = None if alpha is None else 2 * alpha
        self.declared_benchmark = "f2"

    def _offline_for(self, group: tuple[int, ...]) -> Mechanism:
        m = self._cache.get(group)
        if m is None:
            m = self.offline(tuple(self.predictions[k] for k in group))
            if m is None:
                raise ValueError(f"offline family has no mechanism for {len(group)} bidders")
            self._cache[group] = m
        return m

    @staticmethod
    def _local(i: int, earlier: Sequence[int], bids: Sequence):
        # arrived bidders keep their relative index order so ties break the same way
        group = tuple(sorted((*earlier, i)))
        local_bids = tuple(None if k == i else bids[k] for k in group)
        return group, group.index(i), local_bids

    def step_rule(self, i: int, earlier: Sequence[int], bids: Sequence, r) -> StepRule:
        if not earlier:
            return StepRule.single(self.predictions[i])
        group, li, local_bids = self._local(i, earlier, bids)
        return self._offline_for(group).rule(li, local_bids, r)

    def step_distribution(self, i: int, earlier: Sequence[int], bids: Sequence):
        if not earlier:
            return [(ONE, StepRule.single(self.predictions[i]))]
        group, li, local_bids = self._local(i, earlier, bids)
        return self._offline_for(group).rule_distribution(li, local_bids)

    def sample(self, n, rng):
        pi = self.order.draw(n, rng)
        steps = tuple(None if t == 0 else self._offline_for(tuple(sorted(pi[: t + 1]))).sample(t + 1, rng)
                      for t in range(n))
        return pi, steps

    def support(self, n):
        raise NotImplementedError("OSAP is evaluated through rule_distribution or sampling")

    def rule(self, i, bids, r):
        pi, steps = r
        t = pi.index(i)
        return self.step_rule(i, pi[:t], bids, steps[t])

    def rule_distribution(self, i, bids):
        n = len(bids)
        if not self.order.random:
            t = self.order.pi.index(i)
            return self.step_distribution(i, self.order.pi[:t], bids)
        # under a uniform order the set arriving before i is a uniform size
        # followed by a uniform subset of that size
        rest = [k for k in range(n) if k != i]
        pairs = []
        for size in range(n):
            p = Fraction(1, n * comb(n - 1, size))
            for earlier in combinations(rest, size):
                pairs += [(p * q, rule) for q, rule in self.step_distribution(i, earlier, bids)]
        return merge_rules(pairs)


def osap(predictions: Sequence, offline: OfflineFactory = default_offline,
         order: ArrivalOrder | None = None) -> OSAP:
    return OSAP(predictions, offline, order)
