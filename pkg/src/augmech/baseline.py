"""Prediction-free truthful mechanisms used as black boxes.

Each mechanism hands bidder ``i`` a step rule computed from the other bids.
Ties between equal bids follow the canonical order (higher bid first, then
lower index), so a threshold set by competitor ``c`` is inclusive for bidders
with a smaller index than ``c`` and strict otherwise.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


from .benchmarks import f1
from .env import ONE, ZERO, Environment, as_fraction, as_vector
from .mechanism import (
    MAX_SUPPORT,
    Mechanism,
    StepRule,
    SupportTooLarge,
    all_coin_flips,
    merge_rules,
    mix,
    others,
)


def competitor_threshold(i: int, ranked: list[tuple[int, Fraction]], k: int) -> tuple[Fraction, bool]:
    """Bid bidder ``i`` must clear to rank ahead of the ``k``-th best other bidder.

    ``ranked`` comes from :func:`others`; with fewer than ``k`` competitors the
    threshold is an inclusive 0.
    """
    if len(ranked) < k:
        return ZERO, False
    c, t = ranked[k - 1]
    return t, not i < c


class PostedPrice(Mechanism):
    def __init__(self, prices: Sequence, level=ONE, name: str = "posted"):
        self.prices = as_vector(prices)
        if any(p < 0 for p in self.prices):
            raise ValueError("prices must be nonnegative")
        self.level = as_fraction(level)
        self.name = name

    def rule(self, i, bids, r):
        return StepRule.single(self.prices[i], self.level)


def posted_price(prices: Sequence) -> PostedPrice:
    return PostedPrice(prices)


class VickreyL(Mechanism):
    """Serves the top ``l`` bidders at the (l+1)-th bid, each at ``level``."""

    def __init__(self, l: int, level=ONE, name: str | None = None):
        if l < 1:
            raise ValueError("l must be >= 1")
        self.l = l
        self.level = as_fraction(level)
        if not ZERO < self.level <= ONE:
            raise ValueError("level must lie in (0, 1]")
        self.name = name or f"vickrey{l}"
        self.top_winners = l

    def rule(self, i, bids, r):
        t, strict = competitor_threshold(i, others(bids, i), self.l)
        return StepRule.single(t, self.level, strict)


def vickrey_l(l: int, env: Environment | None = None) -> VickreyL:
    """``l``-unit Vickrey; in a cap environment each winner gets ``c(l)/l``."""
    level = ONE if env is None else min(ONE, env.c(l) / l)
    return VickreyL(l, level)


class RSCS(Mechanism):
    """Random sampling cost sharing for a digital good.

    A realization assigns every bidder a fair coin.  Bidder ``i`` faces
    ``F = F1`` of the opposite side and the cheapest share ``F/k`` it could
    still join, given how many same-side bidders can pay that share.
    """

    name = "rscs"
    declared_alpha = Fraction(4)
    declared_benchmark = "f2"

    def support(self, n):
        p = Fraction(1, 2**n)
        return [(p, flips) for flips in all_coin_flips(n)]

    def sample(self, n, rng):
        return tuple(bool(c) for c in rng.integers(0, 2, size=n))

    @staticmethod
    def threshold(same: list[Fraction], opposite: list[Fraction]) -> Fraction:
        F = f1(opposite) if opposite else ZERO
        if F == 0:
            return ZERO
        same = sorted(same, reverse=True)
        best = F
        for k in range(2, len(same) + 2):
            share = F / k
            if same[k - 2] >= share:
                best = share
        return best

    def rule(self, i, bids, r):
        if len(bids) < 2:
            raise ValueError("rscs needs at least two bidders")
        side = r[i]
        same = [b for k, b in enumerate(bids) if k != i and r[k] == side]
        opp = [b for k, b in enumerate(bids) if k != i and r[k] != side]
        return StepRule.single(self.threshold(same, opp))

    def rule_distribution(self, i, bids):
        # only the split of the other bidders matters
        n = len(bids)
        if n < 2:
            raise ValueError("rscs needs at least two bidders")
        rest = [b for k, b in enumerate(bids) if k != i]
        if 2 ** len(rest) > MAX_SUPPORT:
            raise SupportTooLarge(f"rscs with {n} bidders")
        p = Fraction(1, 2 ** len(rest))
        pairs = []
        for flips in all_coin_flips(len(rest)):
            same = [b for b, f in zip(rest, flips) if f]
            opp = [b for b, f in zip(rest, flips) if not f]
            pairs.append((p, StepRule.single(self.threshold(same, opp))))
        return merge_rules(pairs)


def rscs() -> RSCS:
    return RSCS()


class TopLReduce(Mechanism):
    """Runs a digital-good mechanism on the top ``l`` bids only.

    Bids outside the top ``l`` are replaced by 0 before the inner mechanism
    sees them, and the inner rule is floored at the best discarded bid so
    only bidders that are actually in the top ``l`` can win.
    """

    def __init__(self, inner: Mechanism, l: int):
        if l < 1:
            raise ValueError("l must be >= 1")
        self.inner = inner
        self.l = l
        self.name = f"top{l}({inner.name})"
        self.top_winners = l

    def support(self, n):
        return self.inner.support(n)

    def sample(self, n, rng):
        return self.inner.sample(n, rng)

    def _reduce(self, i, bids):
        ranked = others(bids, i)
        keep = {k for k, _ in ranked[: self.l - 1]}
        reduced = tuple(None if k == i else (b if k in keep else ZERO) for k, b in enumerate(bids))
        return reduced, competitor_threshold(i, ranked, self.l)

    def rule(self, i, bids, r):
        reduced, (t, strict) = self._reduce(i, bids)
        return self.inner.rule(i, reduced, r).floor(t, strict)

    def rule_distribution(self, i, bids):
        reduced, (t, strict) = self._reduce(i, bids)
        return merge_rules((p, rule.floor(t, strict)) for p, rule in self.inner.rule_distribution(i, reduced))


def top_l_reduce(inner: Mechanism, l: int) -> TopLReduce:
    return TopLReduce(inner, l)


def limited_supply_blackbox(l: int) -> Mechanism:
    """Even mix of ``l``-unit Vickrey and RSCS on the top ``l`` bids.

    No ratio is declared; the harness measures one empirically.
    """
    m = mix((VickreyL(l), 1), (top_l_reduce(rscs(), l), 1), name=f"lsa-blackbox{l}")
    m.declared_alpha = None
    m.declared_benchmark = "efo2"
    return m


def vickrey_mix(env: Environment) -> Mechanism:
    """Uniform mix of ``k``-unit Vickrey auctions, k = 1..n-1, scaled to fit the caps.

    Used as the black box for general cap environments.  Every component
    serves only the top ``k`` bidders, so the mix serves at most the top
    ``n - 1``.
    """
    n = env.n
    if n < 2:
        raise ValueError("vickrey-mix needs at least two bidders")
    comps = [(vickrey_l(k, env), 1) for k in range(1, n) if env.c(k) > 0]
    if not comps:
        raise ValueError("environment allocates nothing")
    m = mix(*comps, name="vickrey-mix")
    m.declared_alpha = None
    m.declared_benchmark = "efo2"
    return m


BLACKBOXES = ("rscs", "lsa-blackbox", "vickrey-mix")


def make_blackbox(name: str, env: Environment) -> Mechanism:
    if name == "rscs":
        return rscs()
    if name == "lsa-blackbox":
        if env.supply is None:
            raise ValueError("lsa-blackbox needs a limited-supply environment")
        return limited_supply_blackbox(env.supply)
    if name == "vickrey-mix":
        return vickrey_mix(env)
    raise ValueError(f"unknown black box {name!r}")
