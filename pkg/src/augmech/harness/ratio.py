"""Empirical competitive ratios over generated instances."""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from ..benchmarks import evaluate
from ..env import ZERO
from ..mechanism import SupportTooLarge, expected_revenue, sampled_revenue
from ..registry import MechanismSpec
from . import instances as gen
from .fast import dga_augmented_revenue
from .instances import Instance

Z99 = 2.5758293035489004


@dataclass(frozen=True)
class GeneratorConfig:
    """How to draw one instance: value law, environment, prediction error model."""

    n: int = 10
    values: str = "equal-revenue"  # equal-revenue | small | rational
    env: str = "digital"  # digital | supply | cap
    predictions: str = "mixed"  # exact | k-wrong | independent | eta | mixed
    k: int = 1
    eta: Fraction = Fraction(2)

    def draw_values(self, rng):
        if self.values == "equal-revenue":
            return gen.equal_revenue(self.n, rng)
        if self.values == "small":
            return gen.small_integers(self.n, rng)
        if self.values == "rational":
            return gen.small_rationals(self.n, rng)
        raise ValueError(f"unknown value law {self.values!r}")

    def draw_predictions(self, v, rng):
        model = self.predictions
        if model == "mixed":
            choice = int(rng.integers(0, 5))
            if choice == 4:
                return self.draw_values(rng)
            return gen.k_wrong(v, min(choice, self.n), rng)
        if model == "exact":
            return v
        if model == "k-wrong":
            return gen.k_wrong(v, self.k, rng)
        if model == "independent":
            return self.draw_values(rng)
        if model == "eta":
            return gen.eta_controlled(v, self.eta, rng)
        raise ValueError(f"unknown prediction model {model!r}")

    def __call__(self, rng: np.random.Generator) -> Instance:
        v = self.draw_values(rng)
        env = gen.random_env(self.env, self.n, rng)
        return Instance(v, self.draw_predictions(v, rng), env)


@dataclass
class TrialResult:
    instance_id: int
    mechanism: str
    benchmark: str
    revenue: float
    benchmark_value: float
    ratio: float
    se: float = 0.0
    exact: bool = True

    @property
    def ratio_upper(self) -> float:
        """Ratio with the revenue raised by three standard errors."""
        rev = self.revenue + 3 * self.se
        return math.inf if rev <= 0 else self.benchmark_value / rev


@dataclass
class RatioReport:
    mechanism: str
    benchmark: str
    trials: int
    seed: int
    mean_revenue: float
    mean_benchmark: float
    mean_ratio: float
    half_width: float
    worst_ratio: float
    worst_ratio_margin: float
    worst_instance: int
    skipped: int
    declared_alpha: float | None = None

    def to_json(self) -> dict:
        return asdict(self)


def revenue_of(spec: MechanismSpec, inst: Instance, rng: np.random.Generator, inner_trials: int,
               fast: bool):
    """``(revenue, standard error, exact)`` for one instance."""
    if fast and spec.name == "dga-augmented" and spec.gamma is None and (spec.blackbox or "rscs") == "rscs":
        r = dga_augmented_revenue(inst.values, inst.predictions, spec.alpha or Fraction(4), rng)
        return r.mean, r.se, r.exact
    mech = spec.build(inst.predictions, inst.env)
    try:
        return float(expected_revenue(mech, inst.values)), 0.0, True
    except SupportTooLarge:
        draws = sampled_revenue(mech, inst.values, rng, inner_trials)
        return float(draws.mean()), float(draws.std(ddof=1) / math.sqrt(len(draws))), False


def _run_trials(args) -> list[TrialResult | None]:
    spec, generator, benchmark, seeds, first_id, inner_trials, fast = args
    out = []
    for k, s in enumerate(seeds):
        rng = np.random.default_rng(s)
        inst = generator(rng)
        bench = evaluate(benchmark, inst.values, inst.env)
        if bench == ZERO:
            out.append(None)
            continue
        rev, se, exact = revenue_of(spec, inst, rng, inner_trials, fast)
        ratio = math.inf if rev <= 0 else float(bench) / rev
        out.append(TrialResult(first_id + k, spec.name, benchmark, rev, float(bench), ratio, se, exact))
    return out


def workers_from_env() -> int:
    try:
        return max(1, int(os.environ.get("AUGMECH_THREADS", "1")))
    except ValueError:
        return 1


def run_trials(spec: MechanismSpec, generator: Callable, benchmark: str, trials: int, seed: int,
               inner_trials: int = 2000, fast: bool = True, workers: int | None = None) -> list[TrialResult | None]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seeds = np.random.SeedSequence(seed).spawn(trials)
    workers = workers or workers_from_env()
    chunk = max(1, math.ceil(trials / (4 * workers)))
    jobs = [(spec, generator, benchmark, seeds[s : s + chunk], s, inner_trials, fast)
            for s in range(0, trials, chunk)]
    if workers == 1:
        parts = map(_run_trials, jobs)
        return [r for part in parts for r in part]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [r for part in pool.map(_run_trials, jobs) for r in part]


def summarize(results: list[TrialResult | None], spec: MechanismSpec, benchmark: str, seed: int,
              declared_alpha=None) -> RatioReport:
    done = [r for r in results if r is not None]
    skipped = len(results) - len(done)
    if not done:
        raise ValueError("every generated instance had a zero benchmark")
    ratios = np.array([r.ratio for r in done])
    finite = ratios[np.isfinite(ratios)]
    hw = Z99 * float(finite.std(ddof=1)) / math.sqrt(len(finite)) if len(finite) > 1 else 0.0
    worst = max(done, key=lambda r: r.ratio)
    return RatioReport(
        mechanism=spec.name,
        benchmark=benchmark,
        trials=len(results),
        seed=seed,
        mean_revenue=float(np.mean([r.revenue for r in done])),
        mean_benchmark=float(np.mean([r.benchmark_value for r in done])),
        mean_ratio=float(ratios.mean()),
        half_width=hw,
        worst_ratio=worst.ratio,
        worst_ratio_margin=max(r.ratio_upper for r in done),
        worst_instance=worst.instance_id,
        skipped=skipped,
        declared_alpha=None if declared_alpha is None else float(declared_alpha),
    )


def estimate_ratio(spec: MechanismSpec, generator: Callable, benchmark: str, trials: int, seed: int = 0,
                   **kw) -> tuple[RatioReport, list[TrialResult]]:
    results = run_trials(spec, generator, benchmark, trials, seed, **kw)
    probe = generator(np.random.default_rng(seed))
    declared = spec.build(probe.predictions, probe.env).declared_alpha
    return summarize(results, spec, benchmark, seed, declared), [r for r in results if r is not None]


CSV_COLUMNS = ("instance_id", "mechanism", "benchmark", "revenue", "benchmark_value", "ratio")


def rows_to_csv(rows: list[TrialResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r.instance_id, r.mechanism, r.benchmark, repr(r.revenue), repr(r.benchmark_value), repr(r.ratio)])
    return buf.getvalue()
