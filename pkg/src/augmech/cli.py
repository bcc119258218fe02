"""Command line entry point: ``augmech <command> ...``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .benchmarks import BENCHMARKS, evaluate
from .env import as_fraction, fraction_str
from .errortol import DENSITIES, bound_curves
from .harness import checks
from .harness.instances import load_instance
from .harness.lowerbound import lower_bound_formulas, mc_verify_benchmark_mean
from .harness.ratio import GeneratorConfig, estimate_ratio, rows_to_csv
from .mechanism import SupportTooLarge, expected_revenue, outcome, sampled_revenue
from .registry import MECHANISMS, MechanismSpec


def _emit(text: str, out: str | None) -> None:
    if out and out not in ("csv", "json", "-"):
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _spec(args) -> MechanismSpec:
    return MechanismSpec(
        name=args.mech,
        blackbox=args.blackbox,
        alpha=None if args.alpha is None else as_fraction(args.alpha),
        gamma=None if args.gamma is None else as_fraction(args.gamma),
    )


def _generator(args) -> GeneratorConfig:
    return GeneratorConfig(n=args.n, values=args.values, env=args.env, predictions=args.predictions,
                           k=args.k, eta=as_fraction(args.eta))


def cmd_bench_eval(args) -> int:
    inst = load_instance(args.instance)
    val = evaluate(args.benchmark, inst.values, inst.env)
    print(f"{args.benchmark} = {fraction_str(val)} ({float(val):.10g})")
    return 0


def cmd_run(args) -> int:
    inst = load_instance(args.instance)
    name = "osap" if args.online else args.mech
    spec = MechanismSpec(name, args.blackbox, None if args.alpha is None else as_fraction(args.alpha),
                         None if args.gamma is None else as_fraction(args.gamma))
    mech = spec.build(inst.predictions, inst.env)
    rng = np.random.default_rng(args.seed)
    trials = args.orders if args.online else args.trials
    summary = {"mechanism": mech.name, "instance": inst.to_json(), "seed": args.seed, "trials": trials}
    try:
        exact = expected_revenue(mech, inst.values)
        summary["expected_revenue"] = fraction_str(exact)
    except SupportTooLarge:
        summary["expected_revenue"] = None
    draws = sampled_revenue(mech, inst.values, rng, trials)
    summary["sampled_mean_revenue"] = float(draws.mean())
    summary["sampled_std_revenue"] = float(draws.std(ddof=1)) if trials > 1 else 0.0
    last = outcome(mech, inst.values, mech.sample(inst.n, rng))
    summary["example_outcome"] = last.to_json()
    for b in ("opt", "f2", "efo2"):
        try:
            summary[b] = fraction_str(evaluate(b, inst.values, inst.env))
        except ValueError:
            pass
    print(json.dumps(summary, indent=2))
    return 0


def cmd_ratio(args) -> int:
    spec = _spec(args)
    report, rows = estimate_ratio(spec, _generator(args), args.benchmark, args.trials, args.seed,
                                  inner_trials=args.inner_trials, fast=not args.exact)
    if args.out == "json" or (args.out and args.out.endswith(".json")):
        _emit(json.dumps(report.to_json(), indent=2) + "\n", args.out)
    else:
        _emit(rows_to_csv(rows), args.out)
    return 0


def cmd_truthfulness(args) -> int:
    rng = np.random.default_rng(args.seed)
    gen = _generator(args)
    report = None
    for _ in range(args.trials):
        inst = gen(rng)
        mech = _spec(args).build(inst.predictions, inst.env)
        report = checks.check_truthful(mech, inst.values, report)
    print(json.dumps({"mechanism": report.mechanism, "instances": report.instances, "checks": report.checks,
                      "min_points": report.min_points, "violations": len(report.violations)}))
    return 0 if report.ok else 1


def cmd_feasibility(args) -> int:
    rng = np.random.default_rng(args.seed)
    gen = _generator(args)
    report = None
    for _ in range(args.trials):
        inst = gen(rng)
        mech = _spec(args).build(inst.predictions, inst.env)
        report = checks.check_feasible(mech, inst.values, inst.env, rng, report=report)
    print(json.dumps({"mechanism": report.mechanism, "outcomes": report.outcomes,
                      "violations": len(report.violations)}))
    return 0 if report.ok else 1


def _grid(text: str) -> list[float]:
    a, b, step = (float(x) for x in text.split(":"))
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + k * step for k in range(count)]


def cmd_figure(args) -> int:
    density = DENSITIES[args.gamma_density]
    rows = bound_curves(density, _grid(args.eta_grid), args.beta)
    text = "eta,consistency_ratio,robustness_ratio\n" + "".join(f"{e!r},{c!r},{r!r}\n" for e, c, r in rows)
    _emit(text, args.out)
    return 0


def cmd_lowerbound(args) -> int:
    lb = lower_bound_formulas(args.N, args.alpha)
    out = dict(lb.__dict__)
    if args.samples:
        out["mc_benchmark_mean"] = mc_verify_benchmark_mean(args.N, args.samples, np.random.default_rng(args.seed))
    print(json.dumps(out, indent=2))
    return 0


def _add_mech_args(p) -> None:
    p.add_argument("--mech", default="dga-augmented", choices=MECHANISMS)
    p.add_argument("--blackbox", default=None)
    p.add_argument("--alpha", default=None, help="override the black box's declared ratio")
    p.add_argument("--gamma", default=None, help="wrap in the error-tolerant snap with this confidence")


def _add_gen_args(p) -> None:
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--values", default="equal-revenue", choices=("equal-revenue", "small", "rational"))
    p.add_argument("--env", default="digital", choices=("digital", "supply", "cap"))
    p.add_argument("--predictions", default="mixed", choices=("exact", "k-wrong", "independent", "eta", "mixed"))
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eta", default="2")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="augmech", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="benchmark utilities")
    bsub = bench.add_subparsers(dest="bench_command", required=True)
    be = bsub.add_parser("eval", help="evaluate a benchmark on an instance file")
    be.add_argument("--instance", required=True)
    be.add_argument("--benchmark", default="efo2",
                    help=f"one of {', '.join(BENCHMARKS)} or efoM for an integer M")
    be.set_defaults(func=cmd_bench_eval)

    run = sub.add_parser("run", help="run a mechanism on one instance")
    _add_mech_args(run)
    run.add_argument("--instance", required=True)
    run.add_argument("--trials", type=int, default=1000)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--online", action="store_true", help="use the online mechanism over random orders")
    run.add_argument("--orders", type=int, default=1000)
    run.set_defaults(func=cmd_run)

    ratio = sub.add_parser("ratio", help="empirical competitive ratio over generated instances")
    _add_mech_args(ratio)
    _add_gen_args(ratio)
    ratio.add_argument("--benchmark", default="f2")
    ratio.add_argument("--trials", type=int, default=1000)
    ratio.add_argument("--inner-trials", type=int, default=2000)
    ratio.add_argument("--seed", type=int, default=0)
    ratio.add_argument("--exact", action="store_true", help="skip the vectorized fast path")
    ratio.add_argument("--out", default="csv", help="csv, json, or a file path")
    ratio.set_defaults(func=cmd_ratio)

    for name, func in (("truthfulness", cmd_truthfulness), ("feasibility", cmd_feasibility)):
        p = sub.add_parser(name, help=f"{name} check on generated instances")
        _add_mech_args(p)
        _add_gen_args(p)
        p.set_defaults(n=4, values="small")
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)

    fig = sub.add_parser("figure", help="bound curves for a randomized confidence level")
    fig.add_argument("--gamma-density", default="exp", choices=sorted(DENSITIES))
    fig.add_argument("--beta", type=float, default=4.42)
    fig.add_argument("--eta-grid", default="1:5:0.05")
    fig.add_argument("--out", default="-")
    fig.set_defaults(func=cmd_figure)

    lb = sub.add_parser("lowerbound", help="closed forms of the two-bidder lower bound")
    lb.add_argument("--N", type=float, default=100.0)
    lb.add_argument("--alpha", type=float, default=4.42)
    lb.add_argument("--samples", type=int, default=0)
    lb.add_argument("--seed", type=int, default=0)
    lb.set_defaults(func=cmd_lowerbound)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"augmech: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
