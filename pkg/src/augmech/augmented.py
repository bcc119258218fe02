"""Prediction-augmented mechanisms built by bid-independent combination.

Every mechanism here picks, for each bidder, which sub-rule applies by
comparing the *other* bids with their predictions.  A bidder whose
competitors all match their predictions is offered the predicted optimum: its
share of ``linear_max(v_hat)`` at unit price ``v_hat_i``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .env import (
    ONE,
    ZERO,
    Environment,
    as_fraction,
    as_vector,
    digital_good,
    linear_max,
)
from .baseline import competitor_threshold
from .mechanism import Mechanism, Mixture, StepRule, others


def wrong_others(bids: Sequence, predictions: Sequence, i: int) -> list[int]:
    return [k for k, (b, p) in enumerate(zip(bids, predictions)) if k != i and b != p]


def _resolve_alpha(blackbox: Mechanism, alpha) -> Fraction:
    a = blackbox.declared_alpha if alpha is None else as_fraction(alpha)
    if a is None:
        raise ValueError(f"{blackbox.name} declares no ratio; pass alpha explicitly")
    if a <= 0:
        raise ValueError("alpha must be positive")
    return a


class PredictedOptimum(Mechanism):
    """Posts ``v_hat_i`` for bidder i's share of the predicted optimal allocation."""

    def __init__(self, predictions: Sequence, env: Environment, name: str = "opt-pred"):
        self.predictions = as_vector(predictions)
        if len(self.predictions) != env.n:
            raise ValueError("prediction dimension does not match environment")
        self.env = env
        self.x_hat, self.value = linear_max(self.predictions, env)
        self.name = name

    def opt_rule(self, i: int) -> StepRule:
        return StepRule.single(self.predictions[i], self.x_hat[i])

    def rule(self, i, bids, r):
        return self.opt_rule(i)


class _BranchOnWrong(Mechanism):
    """Shared plumbing: the branch taken by bidder i depends on the others' errors.

    The randomness is that of ``blackbox`` (or none).  Subclasses implement
    ``branch(i, bids, wrong)`` returning either a ``StepRule`` or ``None`` to
    mean "use the black box".
    """

    blackbox: Mechanism | None = None

    def support(self, n):
        return self.blackbox.support(n) if self.blackbox else super().support(n)

    def sample(self, n, rng):
        return self.blackbox.sample(n, rng) if self.blackbox else None

    def branch(self, i, bids, wrong):
        raise NotImplementedError

    def rule(self, i, bids, r):
        got = self.branch(i, bids, wrong_others(bids, self.predictions, i))
        return self.blackbox.rule(i, bids, r) if got is None else got

    def rule_distribution(self, i, bids):
        got = self.branch(i, bids, wrong_others(bids, self.predictions, i))
        if got is None:
            return self.blackbox.rule_distribution(i, bids)
        return [(ONE, got)]


# ---------------------------------------------------------------------------
# digital good


def mech_dga1(predictions: Sequence) -> PredictedOptimum:
    v_hat = as_vector(predictions)
    return PredictedOptimum(v_hat, digital_good(len(v_hat)), name="dga1")


class DGA2(_BranchOnWrong, PredictedOptimum):
    """Predicted price when every other prediction is right, else the black box."""

    def __init__(self, predictions, blackbox: Mechanism):
        v_hat = as_vector(predictions)
        PredictedOptimum.__init__(self, v_hat, digital_good(len(v_hat)), name=f"dga2({blackbox.name})")
        self.blackbox = blackbox

    def branch(self, i, bids, wrong):
        return self.opt_rule(i) if not wrong else None


def mech_dga2(predictions: Sequence, blackbox: Mechanism) -> DGA2:
    return DGA2(predictions, blackbox)


def digital_good_augmented(predictions: Sequence, blackbox: Mechanism, alpha=None) -> Mixture:
    a = _resolve_alpha(blackbox, alpha)
    m = Mixture([(mech_dga2(predictions, blackbox), a), (mech_dga1(predictions), 2)],
                name=f"dga-augmented({blackbox.name})")
    m.declared_alpha = a + 2
    m.declared_benchmark = "f2"
    return m


# ---------------------------------------------------------------------------
# limited supply


def _supply(env: Environment) -> int:
    if env.supply is None:
        raise ValueError("a limited-supply environment is required")
    return env.supply


class LSA1(Mechanism):
    """Posts ``v_hat`` to the ``l`` highest predictions and rejects the rest."""

    def __init__(self, predictions: Sequence, env: Environment):
        self.predictions = as_vector(predictions)
        l = _supply(env)
        order = sorted(range(len(self.predictions)), key=lambda k: (-self.predictions[k], k))
        self.served = frozenset(order[:l])
        self.name = "lsa1"

    def rule(self, i, bids, r):
        return StepRule.single(self.predictions[i]) if i in self.served else StepRule()


def mech_lsa1(predictions: Sequence, env: Environment) -> LSA1:
    return LSA1(predictions, env)


class LSA2(_BranchOnWrong, PredictedOptimum):
    def __init__(self, predictions, env: Environment, blackbox: Mechanism):
        l = _supply(env)
        if blackbox.top_winners is None or blackbox.top_winners > l:
            raise ValueError(f"{blackbox.name} may serve bidders outside the top {l}")
        PredictedOptimum.__init__(self, predictions, env, name=f"lsa2({blackbox.name})")
        self.blackbox = blackbox

    def branch(self, i, bids, wrong):
        return self.opt_rule(i) if not wrong else None


def mech_lsa2(predictions: Sequence, env: Environment, blackbox: Mechanism) -> LSA2:
    return LSA2(predictions, env, blackbox)


def limited_efo_augmented(predictions: Sequence, env: Environment, blackbox: Mechanism, alpha=None) -> Mixture:
    a = _resolve_alpha(blackbox, alpha)
    m = Mixture([(mech_lsa2(predictions, env, blackbox), a), (mech_lsa1(predictions, env), 2)],
                name=f"lsa-augmented({blackbox.name})")
    m.declared_alpha = a + 2
    m.declared_benchmark = "efo2"
    return m


# ---------------------------------------------------------------------------
# general symmetric environments


class Rank2First(_BranchOnWrong, PredictedOptimum):
    """Predicted optimum with no wrong competitor, rejection with one, black box beyond."""

    def __init__(self, predictions, env: Environment, blackbox: Mechanism):
        PredictedOptimum.__init__(self, predictions, env, name=f"rank2-1({blackbox.name})")
        self.blackbox = blackbox

    def branch(self, i, bids, wrong):
        if not wrong:
            return self.opt_rule(i)
        if len(wrong) == 1:
            return StepRule()
        return None


def mech_rank2_1(predictions: Sequence, env: Environment, blackbox: Mechanism) -> Rank2First:
    return Rank2First(predictions, env, blackbox)


class Insensitive(PredictedOptimum):
    """Drops every competitor that bid below its prediction, then runs the predicted optimum.

    Bidder i is offered its coordinate of ``linear_max`` over the predictions
    with the under-bidding competitors zeroed, at price ``v_hat_i``.
    """

    def __init__(self, predictions, env: Environment):
        super().__init__(predictions, env, name="insensitive")
        self._solve = lru_cache(maxsize=4096)(self._solve_uncached)

    def _solve_uncached(self, dropped: frozenset) -> tuple[Fraction, ...]:
        w = tuple(ZERO if k in dropped else p for k, p in enumerate(self.predictions))
        return linear_max(w, self.env)[0]

    def dropped(self, i: int, bids: Sequence) -> frozenset:
        return frozenset(k for k, (b, p) in enumerate(zip(bids, self.predictions)) if k != i and p > b)

    def rule(self, i, bids, r):
        x = self._solve(self.dropped(i, bids))
        return StepRule.single(self.predictions[i], x[i])


def mech_insensitive(predictions: Sequence, env: Environment) -> Insensitive:
    return Insensitive(predictions, env)


def res_vic_rule(i: int, bids: Sequence, level: Fraction) -> StepRule:
    """Single-item second-price rule with the winner served at ``level``."""
    t, strict = competitor_threshold(i, others(bids, i), 1)
    return StepRule.single(t, level, strict)


def res_vic_level(x_hat: Sequence, j: int) -> Fraction:
    return max(max(x_hat), ONE - x_hat[j])


class Rank2Fourth(_BranchOnWrong, PredictedOptimum):
    """Predicted optimum, restricted Vickrey, or plain Vickrey by the others' error count."""

    def __init__(self, predictions, env: Environment):
        if not env.singletons_feasible:
            raise ValueError("single-winner allocations must be feasible")
        PredictedOptimum.__init__(self, predictions, env, name="rank2-4")

    def branch(self, i, bids, wrong):
        if not wrong:
            return self.opt_rule(i)
        if len(wrong) == 1:
            return res_vic_rule(i, bids, res_vic_level(self.x_hat, wrong[0]))
        return res_vic_rule(i, bids, ONE)


def mech_rank2_4(predictions: Sequence, env: Environment) -> Rank2Fourth:
    return Rank2Fourth(predictions, env)


def downward_closed_augmented(predictions: Sequence, env: Environment, blackbox: Mechanism, alpha=None) -> Mixture:
    a = _resolve_alpha(blackbox, alpha)
    m = Mixture(
        [
            (mech_rank2_1(predictions, env, blackbox), a),
            (mech_insensitive(predictions, env), 3),
            (mech_rank2_4(predictions, env), 4),
        ],
        name=f"dc-augmented({blackbox.name})",
    )
    m.declared_alpha = a + 7
    m.declared_benchmark = "efo2"
    return m
