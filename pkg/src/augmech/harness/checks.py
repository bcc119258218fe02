"""Drivers for the structural checks: consistency, truthfulness, feasibility, bid-independence."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..env import ONE, ZERO, Environment, as_vector, is_feasible
from ..mechanism import (
    Mechanism,
    Mixture,
    StepRule,
    SupportTooLarge,
    mask,
    outcome,
)

EPS = Fraction(1, 1000)


# ---------------------------------------------------------------------------
# per-realization revenue


def realization_revenues(mech: Mechanism, bids: Sequence) -> set[Fraction]:
    """Every revenue some realization of ``mech`` can produce on ``bids``.

    Mixtures are split by component.  Inside a component, if each bidder's
    payment is the same under every rule it can face, the revenue is that sum
    for every realization; otherwise the support is enumerated.
    """
    bids = as_vector(bids)
    if isinstance(mech, Mixture):
        out: set[Fraction] = set()
        for m, w in mech.components:
            if w > 0:
                out |= realization_revenues(m, bids)
        return out
    total = ZERO
    for i, b in enumerate(bids):
        pays = {rule.payment(b) for _, rule in mech.rule_distribution(i, mask(bids, i))}
        if len(pays) != 1:
            return {outcome(mech, bids, r).revenue for _, r in mech.support(len(bids))}
        total += pays.pop()
    return {total}


# ---------------------------------------------------------------------------
# truthfulness


def deviation_grid(value: Fraction, bids: Sequence, i: int, rules: Iterable[StepRule],
                   extra: Iterable = ()) -> list[Fraction]:
    """Deviation bids: a lattice of value multiples, the others and their midpoints, every threshold +- eps.

    The lattice alone gives more than 20 points for a positive value.
    """
    pts = {value * Fraction(k, 8) for k in range(25)}
    pts.update((value * Fraction(11, 10), value * Fraction(9, 10), value * 10, ONE))
    rest = sorted(b for k, b in enumerate(bids) if k != i)
    pts.update(rest)
    pts.update((a + b) / 2 for a, b in zip(rest, rest[1:]))
    for rule in rules:
        for t in rule.thresholds:
            pts.update((t, t + EPS, max(ZERO, t - EPS)))
    for x in extra:
        x = Fraction(x)
        pts.update((x, x + EPS, max(ZERO, x - EPS)))
    return sorted(p for p in pts if p >= 0)


@dataclass
class TruthReport:
    mechanism: str
    instances: int = 0
    checks: int = 0
    min_points: int = 10**9
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def expected_utility_at(dist, value: Fraction, bid: Fraction) -> Fraction:
    return sum((p * rule.utility(bid, value) for p, rule in dist), ZERO)


def check_truthful(mech: Mechanism, values: Sequence, report: TruthReport | None = None,
                   extra_points: Sequence[Iterable] | None = None) -> TruthReport:
    """Exact expected-utility comparison of truthful bidding against the deviation grid.

    Utilities at deviations are evaluated on the deviated bid vector, never
    on the truthful one.
    """
    values = as_vector(values)
    report = report or TruthReport(mech.name)
    report.instances += 1
    # the masked vector is everything a rule may depend on, so it is a safe cache key
    cache: dict = {}

    def dist_for(i, bids):
        key = (i, mask(bids, i))
        if key not in cache:
            cache[key] = mech.rule_distribution(i, key[1])
        return cache[key]

    for i, v in enumerate(values):
        truth_dist = dist_for(i, values)
        u_truth = expected_utility_at(truth_dist, v, v)
        grid = deviation_grid(v, values, i, (r for _, r in truth_dist),
                              extra_points[i] if extra_points else ())
        report.min_points = min(report.min_points, len(grid))
        for b in grid:
            dev = list(values)
            dev[i] = b
            dist = dist_for(i, dev)
            u = expected_utility_at(dist, v, b)
            report.checks += 1
            if u > u_truth:
                report.violations.append((values, i, b, u, u_truth))
    return report


def check_bid_independent(mech: Mechanism, bids: Sequence, i: int, alternatives: Iterable,
                          r=None) -> bool:
    """Rules for ``i`` must not change when only ``b_i`` changes, even if it is visible."""
    bids = list(as_vector(bids))
    base = mech.rule(i, mask(bids, i), r)
    for b in alternatives:
        bids[i] = Fraction(b)
        if mech.rule(i, mask(bids, i), r) != base:
            return False
    return True


# ---------------------------------------------------------------------------
# feasibility


@dataclass
class FeasibilityReport:
    mechanism: str
    outcomes: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def component_realizations(mech: Mechanism, n: int, rng: np.random.Generator, samples: int):
    """A few realizations covering every mixture component (sampled inside each)."""
    if isinstance(mech, Mixture):
        for k, (m, w) in enumerate(mech.components):
            if w > 0:
                for r in component_realizations(m, n, rng, samples):
                    yield (k, r)
        return
    try:
        sup = mech.support(n)
    except (SupportTooLarge, NotImplementedError):
        sup = None
    if sup is not None and len(sup) <= samples:
        yield from (r for _, r in sup)
    else:
        for _ in range(samples):
            yield mech.sample(n, rng)


def check_feasible(mech: Mechanism, values: Sequence, env: Environment, rng: np.random.Generator,
                   samples: int = 4, report: FeasibilityReport | None = None) -> FeasibilityReport:
    values = as_vector(values)
    report = report or FeasibilityReport(mech.name)
    for r in component_realizations(mech, len(values), rng, samples):
        out = outcome(mech, values, r)
        report.outcomes += 1
        if not is_feasible(out.x, env):
            report.violations.append((values, r, out.x))
        if any(p > x * b for p, x, b in zip(out.payments, out.x, values)):
            report.violations.append((values, r, "individual rationality"))
    return report
