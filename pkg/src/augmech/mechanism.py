"""Step rules, the bid-independent mechanism interface, and outcome evaluation.

A truthful single-parameter mechanism is described per bidder by the
allocation curve it offers as a function of that bidder's own bid.  Every
mechanism in this package produces those curves as ``StepRule`` objects
computed from the *other* bids only: ``Mechanism.rule`` receives the bid
vector with the bidder's own entry replaced by ``None``, so a rule that tried
to read it would fail rather than silently break truthfulness.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .env import ONE, ZERO, Environment, as_fraction, as_vector, is_feasible

MAX_SUPPORT = 1 << 13


class SupportTooLarge(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class Jump:
    threshold: Fraction
    strict: bool
    level: Fraction

    def passed(self, b) -> bool:
        return b > self.threshold or (b == self.threshold and not self.strict)


@dataclass(frozen=True)
class StepRule:
    """Monotone step allocation curve with Myerson threshold payments.

    A jump ``(t, level, strict)`` is active for bids ``b >= t`` (``b > t`` when
    strict).  Jumps are ordered by ``(t, strict)`` and their levels strictly
    increase; below the first jump the allocation is 0.
    """

    jumps: tuple[Jump, ...] = ()

    def __post_init__(self):
        prev_key, prev_level = None, ZERO
        for j in self.jumps:
            if j.threshold < 0:
                raise ValueError("thresholds must be nonnegative")
            key = (j.threshold, j.strict)
            if prev_key is not None and key <= prev_key:
                raise ValueError("jump thresholds must strictly increase")
            if not prev_level < j.level <= ONE:
                raise ValueError("jump levels must strictly increase within (0, 1]")
            prev_key, prev_level = key, j.level

    @classmethod
    def single(cls, threshold, level=ONE, strict: bool = False) -> "StepRule":
        level = as_fraction(level)
        if level == 0:
            return cls()
        return cls((Jump(as_fraction(threshold), strict, level),))

    @classmethod
    def from_points(cls, points: Iterable[tuple[Fraction, bool, Fraction]]) -> "StepRule":
        """Build from ``(threshold, strict, level_from_here_on)`` breakpoints.

        Breakpoints that do not raise the level are dropped; a decrease means
        the caller constructed a non-monotone curve.
        """
        jumps, level = [], ZERO
        for t, strict, lv in sorted(points, key=lambda p: (p[0], p[1])):
            if lv < level:
                raise ValueError("allocation curve is not monotone")
            if lv > level:
                if jumps and (jumps[-1].threshold, jumps[-1].strict) == (t, strict):
                    jumps[-1] = Jump(t, strict, lv)
                else:
                    jumps.append(Jump(t, strict, lv))
                level = lv
        return cls(tuple(jumps))

    @property
    def thresholds(self) -> tuple[Fraction, ...]:
        return tuple(j.threshold for j in self.jumps)

    def level(self, b) -> Fraction:
        out = ZERO
        for j in self.jumps:
            if not j.passed(b):
                break
            out = j.level
        return out

    def right_level(self, t) -> Fraction:
        """Level just above ``t``."""
        out = ZERO
        for j in self.jumps:
            if j.threshold > t:
                break
            out = j.level
        return out

    def payment(self, b) -> Fraction:
        pay, prev = ZERO, ZERO
        for j in self.jumps:
            if not j.passed(b):
                break
            pay += j.threshold * (j.level - prev)
            prev = j.level
        return pay

    def utility(self, b, value) -> Fraction:
        return self.level(b) * value - self.payment(b)

    def floor(self, t, strict: bool) -> "StepRule":
        """Zero out every bid that does not clear ``t`` (``> t`` when strict)."""
        t = as_fraction(t)
        start = self.right_level(t) if strict else self.level(t)
        pts = [(t, strict, start)]
        pts += [(j.threshold, j.strict, j.level) for j in self.jumps if (j.threshold, j.strict) > (t, strict)]
        return StepRule.from_points(pts)


# ---------------------------------------------------------------------------


@dataclass
class MechanismOutcome:
    x: tuple[Fraction, ...]
    payments: tuple[Fraction, ...]

    @property
    def revenue(self) -> Fraction:
        return sum(self.payments, ZERO)

    def to_json(self) -> dict:
        return {
            "x": [str(v) for v in self.x],
            "payments": [str(p) for p in self.payments],
            "revenue": str(self.revenue),
        }


def mask(bids: Sequence, i: int) -> tuple:
    b = list(bids)
    b[i] = None
    return tuple(b)


def others(bids: Sequence, i: int) -> list[tuple[int, Fraction]]:
    """``(index, bid)`` pairs of everyone but ``i``, best first."""
    out = [(k, b) for k, b in enumerate(bids) if k != i]
    out.sort(key=lambda kb: (-kb[1], kb[0]))
    return out


class Mechanism:
    """A randomized truthful mechanism given as a distribution of bid-independent rules.

    Subclasses implement ``rule``; randomized ones also implement ``support``
    (exact enumeration) and ``sample``.  A realization is any hashable value.
    """

    name: str = "mechanism"
    declared_alpha: Fraction | None = None
    declared_benchmark: str | None = None
    # largest l such that the winner set always lies in the top-l bidders
    top_winners: int | None = None

    def support(self, n: int) -> list[tuple[Fraction, Any]]:
        return [(ONE, None)]

    def sample(self, n: int, rng: np.random.Generator) -> Any:
        return None

    def rule(self, i: int, bids: Sequence, r: Any) -> StepRule:
        raise NotImplementedError

    def rule_distribution(self, i: int, bids: Sequence) -> list[tuple[Fraction, StepRule]]:
        return merge_rules((p, self.rule(i, bids, r)) for p, r in self.support(len(bids)))

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def merge_rules(pairs: Iterable[tuple[Fraction, StepRule]]) -> list[tuple[Fraction, StepRule]]:
    acc: dict[StepRule, Fraction] = {}
    for p, rule in pairs:
        acc[rule] = acc.get(rule, ZERO) + p
    return [(p, rule) for rule, p in acc.items()]


def outcome(mech: Mechanism, bids: Sequence, r: Any = None) -> MechanismOutcome:
    bids = as_vector(bids)
    x, pay = [], []
    for i, b in enumerate(bids):
        rule = mech.rule(i, mask(bids, i), r)
        x.append(rule.level(b))
        pay.append(rule.payment(b))
    return MechanismOutcome(tuple(x), tuple(pay))


def realizations(mech: Mechanism, bids: Sequence):
    """Yield ``(probability, outcome)`` over the full support."""
    for p, r in mech.support(len(bids)):
        yield p, outcome(mech, bids, r)


def expected_payments(mech: Mechanism, bids: Sequence) -> tuple[Fraction, ...]:
    bids = as_vector(bids)
    out = []
    for i, b in enumerate(bids):
        dist = mech.rule_distribution(i, mask(bids, i))
        out.append(sum((p * rule.payment(b) for p, rule in dist), ZERO))
    return tuple(out)


def expected_revenue(mech: Mechanism, bids: Sequence) -> Fraction:
    return sum(expected_payments(mech, bids), ZERO)


def sampled_revenue(mech: Mechanism, bids: Sequence, rng: np.random.Generator, trials: int) -> np.ndarray:
    bids = as_vector(bids)
    return np.array([float(outcome(mech, bids, mech.sample(len(bids), rng)).revenue) for _ in range(trials)])


def expected_utility(mech: Mechanism, i: int, value, bids: Sequence, bid) -> Fraction:
    dist = mech.rule_distribution(i, mask(bids, i))
    return sum((p * rule.utility(bid, value) for p, rule in dist), ZERO)


def check_feasible(out: MechanismOutcome, env: Environment) -> bool:
    return is_feasible(out.x, env)


# ---------------------------------------------------------------------------
# mixtures


class Mixture(Mechanism):
    """Runs component ``k`` with probability ``w_k / sum(w)``."""

    def __init__(self, components: Sequence[tuple[Mechanism, Any]], name: str | None = None):
        comps = [(m, as_fraction(w)) for m, w in components]
        if not comps:
            raise ValueError("mixture needs at least one component")
        if any(w < 0 for _, w in comps):
            raise ValueError("mixture weights must be nonnegative")
        total = sum((w for _, w in comps), ZERO)
        if total == 0:
            raise ValueError("mixture weights sum to zero")
        self.components = [(m, w / total) for m, w in comps]
        self.name = name or "mix(" + ", ".join(m.name for m, _ in comps) + ")"
        tops = [m.top_winners for m, _ in comps]
        self.top_winners = None if any(t is None for t in tops) else max(tops)

    @property
    def probabilities(self) -> tuple[Fraction, ...]:
        return tuple(w for _, w in self.components)

    def support(self, n):
        out = []
        for k, (m, w) in enumerate(self.components):
            if w == 0:
                continue
            out += [(w * p, (k, r)) for p, r in m.support(n)]
        if len(out) > MAX_SUPPORT:
            raise SupportTooLarge(f"{self.name}: support {len(out)}")
        return out

    def sample(self, n, rng):
        probs = np.array([float(w) for _, w in self.components])
        k = int(rng.choice(len(probs), p=probs / probs.sum()))
        return k, self.components[k][0].sample(n, rng)

    def rule(self, i, bids, r):
        k, sub = r
        return self.components[k][0].rule(i, bids, sub)

    def rule_distribution(self, i, bids):
        return merge_rules(
            (w * p, rule)
            for m, w in self.components
            if w > 0
            for p, rule in m.rule_distribution(i, bids)
        )


def mix(*components: tuple[Mechanism, Any], name: str | None = None) -> Mixture:
    return Mixture(components, name=name)


def all_coin_flips(n: int):
    if 2**n > MAX_SUPPORT:
        raise SupportTooLarge(f"{2**n} coin patterns")
    return itertools.product((False, True), repeat=n)
