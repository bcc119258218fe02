"""Error-tolerant wrapper: snap near-correct bids onto their predictions.

``approx`` moves every bid within a factor ``gamma`` of its prediction onto
the prediction.  ``errmod`` runs a mechanism on snapped bids; because every
rule in this package is a step function, the composed allocation curve is
again a step function and its threshold payments are exact.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .benchmarks import evaluate, opt
from .env import ONE, Environment, as_fraction, as_vector, digital_good
from .mechanism import Mechanism, StepRule, expected_revenue, merge_rules

INF = math.inf


def error_rate(values: Sequence, predictions: Sequence):
    """Largest multiplicative error ``max(v/v_hat, v_hat/v)``; ``math.inf`` for a lone zero."""
    v, p = as_vector(values), as_vector(predictions)
    if len(v) != len(p):
        raise ValueError("dimension mismatch")
    eta = ONE
    for a, b in zip(v, p):
        if a == b:
            continue
        if a == 0 or b == 0:
            return INF
        eta = max(eta, a / b, b / a)
    return eta


def snaps(b, v_hat, gamma) -> bool:
    if b is None or b <= 0 or v_hat <= 0:
        return False
    return b <= gamma * v_hat and v_hat <= gamma * b


def approx(bids: Sequence, predictions: Sequence, gamma) -> tuple:
    gamma = as_fraction(gamma)
    if gamma < 1:
        raise ValueError("gamma must be >= 1")
    p = as_vector(predictions)
    return tuple(ph if snaps(b, ph, gamma) else b for b, ph in zip(bids, p))


def snap_rule(rule: StepRule, v_hat: Fraction, gamma: Fraction) -> StepRule:
    """Compose ``rule`` with the own-bid snap onto ``v_hat``.

    Bids in ``[v_hat/gamma, gamma*v_hat]`` all get ``rule.level(v_hat)``; the
    curve is unchanged outside that interval.
    """
    if v_hat <= 0:
        return rule
    lo, hi = v_hat / gamma, v_hat * gamma
    pts = [(j.threshold, j.strict, j.level) for j in rule.jumps if j.threshold < lo]
    pts.append((lo, False, rule.level(v_hat)))
    pts.append((hi, True, rule.right_level(hi)))
    pts += [(j.threshold, j.strict, j.level) for j in rule.jumps if j.threshold > hi]
    return StepRule.from_points(pts)


class ErrMod(Mechanism):
    def __init__(self, inner: Mechanism, predictions: Sequence, gamma):
        self.inner = inner
        self.predictions = as_vector(predictions)
        self.gamma = as_fraction(gamma)
        if self.gamma < 1:
            raise ValueError("gamma must be >= 1")
        self.name = f"errmod({inner.name}, {self.gamma})"
        self.top_winners = None

    def support(self, n):
        return self.inner.support(n)

    def sample(self, n, rng):
        return self.inner.sample(n, rng)

    def _snapped(self, bids):
        return approx(bids, self.predictions, self.gamma)

    def rule(self, i, bids, r):
        base = self.inner.rule(i, self._snapped(bids), r)
        return snap_rule(base, self.predictions[i], self.gamma)

    def rule_distribution(self, i, bids):
        return merge_rules(
            (p, snap_rule(rule, self.predictions[i], self.gamma))
            for p, rule in self.inner.rule_distribution(i, self._snapped(bids))
        )


def errmod(inner: Mechanism, predictions: Sequence, gamma) -> ErrMod:
    return ErrMod(inner, predictions, gamma)


@dataclass(frozen=True)
class ErrModCheck:
    eta: object
    gamma: Fraction
    regime: str
    revenue: Fraction
    bound: Fraction
    benchmark: Fraction

    @property
    def ok(self) -> bool:
        return self.revenue >= self.bound

    @property
    def ratio(self) -> float:
        return math.inf if self.revenue == 0 else float(self.benchmark / self.revenue)


def theorem_errmod_check(inner: Mechanism, predictions: Sequence, values: Sequence, gamma,
                         f: str = "f2", beta=None, env: Environment | None = None) -> ErrModCheck:
    """Exact check of the two error regimes for ``errmod(inner)`` on truthful bids.

    With ``eta <= gamma`` the revenue must reach ``OPT/(eta*gamma)``; otherwise
    ``f/(beta*gamma^2)``.  ``beta`` defaults to the wrapped mechanism's declared ratio.
    """
    v = as_vector(values)
    env = env or digital_good(len(v))
    gamma = as_fraction(gamma)
    beta = as_fraction(beta if beta is not None else inner.declared_alpha)
    eta = error_rate(v, predictions)
    revenue = expected_revenue(errmod(inner, predictions, gamma), v)
    if eta != INF and eta <= gamma:
        bench = opt(v, env)
        return ErrModCheck(eta, gamma, "consistent", revenue, bench / (eta * gamma), bench)
    bench = evaluate(f, v, env)
    if bench > opt(v, env):
        raise ValueError(f"benchmark {f} exceeds OPT on this instance")
    return ErrModCheck(eta, gamma, "robust", revenue, bench / (beta * gamma * gamma), bench)


# ---------------------------------------------------------------------------
# randomized confidence level


def exp_density(g: float) -> float:
    return math.exp(1.0 - g) if g >= 1.0 else 0.0


DENSITIES: dict[str, Callable[[float], float]] = {"exp": exp_density}


@dataclass(frozen=True)
class ConfidenceParam:
    """Either a fixed ``gamma`` or a density on ``[1, inf)`` sampled by inverse CDF."""

    gamma: Fraction | None = None
    density: Callable[[float], float] | None = None

    def __post_init__(self):
        if (self.gamma is None) == (self.density is None):
            raise ValueError("give exactly one of gamma or density")
        if self.gamma is not None:
            object.__setattr__(self, "gamma", as_fraction(self.gamma))
            if self.gamma < 1:
                raise ValueError("gamma must be >= 1")
        else:
            _check_density(self.density)

    def cdf(self, g: float) -> float:
        if self.density is None:
            return float(g >= self.gamma)
        return integrate.quad(self.density, 1.0, g, epsabs=1e-12)[0] if g > 1 else 0.0

    def sample(self, rng: np.random.Generator) -> Fraction:
        if self.gamma is not None:
            return self.gamma
        if self.density is exp_density:
            # closed-form inverse of 1 - exp(1 - g)
            u = rng.random()
            return as_fraction(1.0 - math.log1p(-u))
        u = rng.random()
        hi = 2.0
        while self.cdf(hi) < u:
            hi *= 2
        return as_fraction(optimize.brentq(lambda g: self.cdf(g) - u, 1.0, hi, xtol=1e-12))


def _check_density(density: Callable[[float], float]) -> None:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            mass = integrate.quad(density, 1.0, math.inf, epsabs=1e-12, limit=200)[0]
        except integrate.IntegrationWarning as exc:
            raise ValueError(f"density is not integrable on [1, inf): {str(exc).splitlines()[0]}") from None
    if not math.isfinite(mass) or abs(mass - 1.0) > 1e-9:
        raise ValueError(f"density integrates to {mass}, not 1")


def randomized_bounds(density: Callable[[float], float], eta: float, beta: float) -> tuple[float, float]:
    """Revenue fractions guaranteed against OPT and against ``f`` when gamma ~ density."""
    if eta < 1:
        raise ValueError("eta must be >= 1")
    if beta <= 0:
        raise ValueError("beta must be positive")
    tol = 1e-10
    _check_density(density)
    if math.isinf(eta):
        opt_part = 0.0
        f_part = integrate.quad(lambda g: density(g) / g**2, 1.0, math.inf, epsabs=tol, limit=200)[0]
    else:
        opt_part = integrate.quad(lambda g: density(g) / g, eta, math.inf, epsabs=tol, limit=200)[0] / eta
        f_part = integrate.quad(lambda g: density(g) / g**2, 1.0, eta, epsabs=tol, limit=200)[0]
    return opt_part, opt_part + f_part / beta


def bound_curves(density, etas: Sequence[float], beta: float) -> list[tuple[float, float, float]]:
    """Rows ``(eta, 1/optBound, 1/fBound)``."""
    rows = []
    for eta in etas:
        ob, fb = randomized_bounds(density, eta, beta)
        rows.append((float(eta), math.inf if ob == 0 else 1.0 / ob, math.inf if fb == 0 else 1.0 / fb))
    return rows
