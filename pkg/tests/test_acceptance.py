"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with pytest (lines appear in the terminal summary) or directly:
``python3 tests/test_acceptance.py``.
"""
import math
import os
import subprocess
import sys
import tempfile
import time
from fractions import Fraction as F

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))

from augmech.augmented import (  # noqa: E402
    digital_good_augmented,
    downward_closed_augmented,
    limited_efo_augmented,
    mech_dga1,
    mech_dga2,
    mech_insensitive,
    mech_lsa1,
    mech_lsa2,
    mech_rank2_1,
    mech_rank2_4,
)
from augmech.baseline import (  # noqa: E402
    limited_supply_blackbox,
    posted_price,
    rscs,
    top_l_reduce,
    vickrey_l,
    vickrey_mix,
)
from augmech.benchmarks import (  # noqa: E402
    brute_efo,
    efo,
    efom,
    envelope,
    envelope_formula,
    evaluate,
    f2,
    maxv,
    opt,
)
from augmech.env import digital_good, limited_supply  # noqa: E402
from augmech.errortol import (  # noqa: E402
    approx,
    errmod,
    exp_density,
    randomized_bounds,
    theorem_errmod_check,
)
from augmech.harness.checks import (  # noqa: E402
    check_feasible,
    check_truthful,
    realization_revenues,
)
from augmech.harness.fast import dga_augmented_revenue  # noqa: E402
from augmech.harness.instances import (  # noqa: E402
    equal_revenue,
    eta_controlled,
    k_wrong,
    random_env,
    small_integers,
    small_rationals,
)
from augmech.harness.lowerbound import benchmark_mean, limit_bound, mc_verify_benchmark_mean  # noqa: E402
from augmech.mechanism import expected_payments, expected_revenue, outcome  # noqa: E402
from augmech.online import osap  # noqa: E402

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # direct execution without pytest
    ACCEPTANCE_LINES = []

ENVS = ("digital", "supply", "cap")


def _record(num: int, title: str, ok: bool, detail: str, seconds: float) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d} {title}: {detail} ({seconds:.1f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def _run(num, title, body):
    t0 = time.time()
    ok, detail = body()
    _record(num, title, ok, detail, time.time() - t0)
    assert ok, detail


def _prediction(v, rng, wrong=None):
    n = len(v)
    k = int(rng.integers(0, min(3, n) + 1)) if wrong is None else wrong
    return k_wrong(v, k, rng)


def _values(n, rng):
    pick = rng.integers(0, 3)
    if pick == 0:
        return small_integers(n, rng, high=9)
    if pick == 1:
        return small_rationals(n, rng, high=6, den=2)
    return equal_revenue(n, rng, scale=100)


def augmented_mechanisms(pred, env):
    """Every augmented mechanism that applies to ``env``, composites and their parts."""
    n = env.n
    bb = vickrey_mix(env)
    out = [
        mech_rank2_1(pred, env, bb),
        mech_insensitive(pred, env),
        mech_rank2_4(pred, env),
        downward_closed_augmented(pred, env, bb, alpha=4),
    ]
    if env.kind == "digital":
        out += [mech_dga1(pred), mech_dga2(pred, rscs()), digital_good_augmented(pred, rscs()), osap(pred)]
    if env.supply is not None and env.supply < n:
        lbb = limited_supply_blackbox(env.supply)
        out += [mech_lsa1(pred, env), mech_lsa2(pred, env, lbb), limited_efo_augmented(pred, env, lbb, alpha=4)]
    return out


# ---------------------------------------------------------------------------
# 1. perfect consistency


def criterion_1():
    rng = np.random.default_rng(1001)
    bad, checked = [], 0
    for kind in ENVS:
        for _ in range(1000):
            n = int(rng.integers(2, 7))
            env = random_env(kind, n, rng)
            v = _values(n, rng)
            target = opt(v, env)
            for m in augmented_mechanisms(v, env):
                checked += 1
                revs = realization_revenues(m, v)
                if revs != {target}:
                    bad.append((m.name, v, revs, target))
    return not bad, f"{checked} (mechanism, instance) pairs over 3x1000 instances, {len(bad)} mismatches"


# ---------------------------------------------------------------------------
# 2. truthfulness


def truthfulness_suite(kind, pred, env):
    out = {}
    if kind == "digital":
        out.update({
            "posted": posted_price(pred),
            "vickrey-1": vickrey_l(1),
            "rscs": rscs(),
            "dga1": mech_dga1(pred),
            "dga2": mech_dga2(pred, rscs()),
            "dga-augmented": digital_good_augmented(pred, rscs()),
            "osap": osap(pred),
            "errmod(dga-augmented)": errmod(digital_good_augmented(pred, rscs()), pred, F(3, 2)),
        })
    if kind == "supply":
        lv = env.supply
        lbb = limited_supply_blackbox(lv)
        out.update({
            "vickrey-l": vickrey_l(lv),
            "top-l(rscs)": top_l_reduce(rscs(), lv),
            "lsa-blackbox": lbb,
            "lsa1": mech_lsa1(pred, env),
            "lsa2": mech_lsa2(pred, env, lbb),
            "lsa-augmented": limited_efo_augmented(pred, env, lbb, alpha=4),
        })
    bb = vickrey_mix(env)
    out.update({
        "vickrey-mix": bb,
        "rank2-1": mech_rank2_1(pred, env, bb),
        "insensitive": mech_insensitive(pred, env),
        "rank2-4": mech_rank2_4(pred, env),
        "dc-augmented": downward_closed_augmented(pred, env, bb, alpha=4),
        "errmod(dc-augmented)": errmod(downward_closed_augmented(pred, env, bb, alpha=4), pred, 2),
    })
    return out


SHARED = ("vickrey-mix", "rank2-1", "insensitive", "rank2-4", "dc-augmented", "errmod(dc-augmented)")


def criterion_2():
    rng = np.random.default_rng(1002)
    counts: dict[str, int] = {}
    violations: dict[str, int] = {}
    min_points = 10**9
    # environment-specific mechanisms get 500 instances; shared ones are split evenly over the three envs
    for kind in ENVS:
        for t in range(500):
            n = int(rng.integers(2, 5))
            env = limited_supply(n, max(1, n - 1)) if kind == "supply" else random_env(kind, n, rng)
            v = small_integers(n, rng, high=8)
            pred = _prediction(v, rng)
            for name, m in truthfulness_suite(kind, pred, env).items():
                if name in SHARED and t >= 167:
                    continue
                extra = [[p, p / F(3, 2), p * F(3, 2), p / 2, p * 2] for p in pred]
                rep = check_truthful(m, v, extra_points=extra)
                counts[name] = counts.get(name, 0) + 1
                violations[name] = violations.get(name, 0) + len(rep.violations)
                min_points = min(min_points, rep.min_points)
    short = [k for k, c in counts.items() if c < 500]
    total_viol = sum(violations.values())
    ok = total_viol == 0 and min_points >= 20 and not short
    return ok, (f"{len(counts)} mechanisms x >=500 instances, min {min_points} deviation points per bidder, "
                f"{total_viol} violations" + (f", under-sampled {short}" if short else ""))


# ---------------------------------------------------------------------------
# 3. feasibility


def _lsa2_traces():
    """Both one-wrong cases for the limited-supply optimum branch, checked in every realization."""
    env = limited_supply(4, 2)
    lbb = limited_supply_blackbox(2)
    pred = (F(10), F(6), F(4), F(2))
    cases = {
        "over-predicted top bidder": (F(3), F(6), F(4), F(2)),   # v_hat_j > v_j, sigma^-1(j) <= l
        "under-predicted top bidder": (F(10), F(9), F(4), F(2)),  # v_hat_j < v_j, sigma^-1(j) <= l
        "under-predicted low bidder": (F(10), F(6), F(9), F(2)),  # wrong bidder outside the predicted top l
    }
    bad = []
    m = mech_lsa2(pred, env, lbb)
    for label, v in cases.items():
        for _, r in m.support(4):
            o = outcome(m, v, r)
            if sum(o.x) > 2:
                bad.append(label)
    return bad, len(cases)


def _branch_of(m, i, v):
    from augmech.augmented import wrong_others
    from augmech.mechanism import mask

    wrong = wrong_others(mask(v, i), m.predictions, i)
    return len(wrong) if len(wrong) < 2 else 2


def criterion_3():
    rng = np.random.default_rng(1003)
    violations, outcomes, instances = 0, 0, 0
    mixes = set()
    for kind in ENVS:
        for wrong in range(4):
            for _ in range(2500):
                n = int(rng.integers(3, 7))
                env = random_env(kind, n, rng)
                v = small_integers(n, rng, high=9)
                pred = k_wrong(v, wrong, rng)
                ms = [downward_closed_augmented(pred, env, vickrey_mix(env), alpha=4)]
                if kind == "digital":
                    ms += [digital_good_augmented(pred, rscs()), osap(pred)]
                if env.supply is not None and env.supply < n:
                    ms.append(limited_efo_augmented(pred, env, limited_supply_blackbox(env.supply), alpha=4))
                for m in ms:
                    rep = check_feasible(m, v, env, rng, samples=2)
                    outcomes += rep.outcomes
                    violations += len(rep.violations)
                # which branch (0, 1, >=2 wrong competitors) each bidder took in the rank-2 mechanisms
                probe = mech_rank2_4(pred, env)
                mixes.add((wrong, tuple(sorted(_branch_of(probe, i, v) for i in range(n)))))
                instances += 1
    bad_traces, n_traces = _lsa2_traces()
    # every #wrong yields its distinct bidder-branch pattern
    wanted = {0: {0}, 1: {0, 1}, 2: {1, 2}, 3: {2}}
    covered = all(any(w == k and set(b) == wanted[k] for w, b in mixes) for k in wanted)
    ok = violations == 0 and not bad_traces and covered
    return ok, (f"{instances} instances, {outcomes} realized outcomes, {violations} infeasible; "
                f"{n_traces} limited-supply traces ok={not bad_traces}; branch mixes covered={covered}")


# ---------------------------------------------------------------------------
# 4. exact lemma bounds


def _adversarial_predictions(v, wrong, rng):
    """Wrong predictions sit just above the value (forcing rejection), far above, or below."""
    pred = list(v)
    for i in rng.choice(len(v), size=wrong, replace=False):
        mode = int(rng.integers(0, 4))
        if mode == 0:
            pred[i] = v[i] + F(1, 100)
        elif mode == 1:
            pred[i] = v[i] * 3
        elif mode == 2:
            pred[i] = v[i] / 3
        else:
            pred[i] = max(v) * 2
    return tuple(pred)


def _adversarial_values(n, rng):
    pick = rng.integers(0, 3)
    if pick == 0:
        return small_integers(n, rng, high=4)  # heavy ties
    if pick == 1:
        return equal_revenue(n, rng, scale=1000)
    top = F(int(rng.integers(2, 20)))
    return tuple([top] + [F(1)] * (n - 1))


def criterion_4():
    rng = np.random.default_rng(1004)
    bad = {"dga1": 0, "insensitive": 0, "rank2-4": 0}
    for _ in range(10**4):
        n = int(rng.integers(2, 7))
        v = _adversarial_values(n, rng)
        pred = _adversarial_predictions(v, int(rng.integers(0, 2)), rng)
        rev = expected_revenue(mech_dga1(pred), v)
        if rev < f2(v) / 2 or rev < maxv(v) / 2:
            bad["dga1"] += 1
    for _ in range(10**4):
        n = int(rng.integers(3, 7))
        env = random_env(ENVS[int(rng.integers(0, 3))], n, rng)
        v = _adversarial_values(n, rng)
        m = int(rng.integers(1, 3))
        pred = _adversarial_predictions(v, m, rng)
        if expected_revenue(mech_insensitive(pred, env), v) < efom(v, m + 1, env) / (m + 1):
            bad["insensitive"] += 1
    for _ in range(10**4):
        n = int(rng.integers(2, 7))
        env = random_env(ENVS[int(rng.integers(0, 3))], n, rng)
        v = _adversarial_values(n, rng)
        pred = _adversarial_predictions(v, 2, rng)
        v2 = sorted(v, reverse=True)[1]
        if expected_revenue(mech_rank2_4(pred, env), v) < v2 / 2:
            bad["rank2-4"] += 1
    return sum(bad.values()) == 0, f"3 lemmas x 10^4 adversarial instances, violations {bad}"


# ---------------------------------------------------------------------------
# 5. benchmark oracles


def criterion_5():
    rng = np.random.default_rng(1005)
    efo_bad = 0
    for _ in range(1000):
        n = int(rng.integers(1, 5))
        env = random_env(ENVS[int(rng.integers(0, 3))], n, rng) if n > 1 else digital_good(1)
        v = small_rationals(n, rng, high=8, den=2)
        e, b = efo(v, env), brute_efo(v, env, 200)
        if not (b <= e and e - b <= e / 50):
            efo_bad += 1
    env_bad = 0
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        v = _values(n, rng)
        if envelope(v).R != envelope_formula(v):
            env_bad += 1
    dg_bad = 0
    for _ in range(10**4):
        n = int(rng.integers(2, 9))
        v = _values(n, rng)
        if evaluate("efo2", v, digital_good(n)) != f2(v):
            dg_bad += 1
    ok = efo_bad == env_bad == dg_bad == 0
    return ok, f"efo vs grid {efo_bad}/1000, envelope vs formula {env_bad}/1000, EFO2 vs F2 {dg_bad}/10^4 failures"


# ---------------------------------------------------------------------------
# 6. dropping bidders and decomposition


def criterion_6():
    rng = np.random.default_rng(1006)
    drop_bad = dec_bad = 0
    for _ in range(10**4):
        n = int(rng.integers(3, 8))
        env = random_env(ENVS[int(rng.integers(0, 3))], n, rng)
        v = _values(n, rng)
        size = int(rng.integers(0, n))
        S = set(int(k) for k in rng.choice(n, size=size, replace=False))
        m = int(rng.integers(len(S) + 1, n + 1))
        dropped = [F(0) if i in S else x for i, x in enumerate(v)]
        if efo(dropped, env) < F(m - len(S), m) * efom(v, m, env):
            drop_bad += 1
        v2 = sorted(v, reverse=True)[1]
        if efom(v, 2, env) > 2 * v2 + efom(v, 3, env):
            dec_bad += 1
    return drop_bad == dec_bad == 0, f"10^4 (v, S, m) triples: {drop_bad} drop failures, {dec_bad} decomposition failures"


# ---------------------------------------------------------------------------
# 7. parametric robustness


def _dga_pass(rng, trials_per_n=33334):
    worst, worst_margin, ratios, detail = 0.0, 0.0, [], []
    for n in (5, 10, 20):
        local = []
        for _ in range(trials_per_n):
            v = equal_revenue(n, rng)
            k = int(rng.integers(0, 5))
            pred = equal_revenue(n, rng) if k == 4 else k_wrong(v, k, rng)
            r = dga_augmented_revenue(v, pred, F(4), rng)
            bench = float(f2(v))
            ratio = bench / r.mean
            local.append(ratio)
            worst = max(worst, ratio)
            worst_margin = max(worst_margin, bench / (r.mean + 3 * r.se))
        ratios += local
        detail.append(f"n={n} worst {max(local):.3f} mean {np.mean(local):.3f}")
    arr = np.array(ratios)
    mean_upper = arr.mean() - 3 * arr.std(ddof=1) / math.sqrt(len(arr))
    return worst, worst_margin, mean_upper, len(arr), detail


def _alpha_pass(kind, make_bb, make_aug, extra, trials, rng):
    """First pass: empirical black-box ratio; second pass: augmented ratio with that alpha plugged in."""
    insts = []
    for _ in range(trials):
        n = int(rng.integers(3, 7))
        env = random_env(kind, n, rng)
        if kind == "supply" and env.supply >= n:
            env = limited_supply(n, n - 1)
        v = equal_revenue(n, rng, scale=1000)
        k = int(rng.integers(0, 5))
        pred = equal_revenue(n, rng, scale=1000) if k == 4 else k_wrong(v, min(k, n), rng)
        insts.append((v, pred, env, evaluate("efo2", v, env)))
    alpha = max(bench / expected_revenue(make_bb(env), v) for v, _, env, bench in insts)
    worst = max(bench / expected_revenue(make_aug(pred, env, alpha), v) for v, pred, env, bench in insts)
    return alpha, worst, worst <= alpha + extra


def criterion_7():
    rng = np.random.default_rng(1007)
    worst, worst_margin, mean_upper, count, detail = _dga_pass(rng)
    dga_ok = worst_margin <= 6 and mean_upper <= 6
    a_ls, w_ls, ls_ok = _alpha_pass(
        "supply",
        lambda env: limited_supply_blackbox(env.supply),
        lambda p, env, a: limited_efo_augmented(p, env, limited_supply_blackbox(env.supply), alpha=a),
        2, 10**4, rng)
    a_dc, w_dc, dc_ok = _alpha_pass(
        "cap",
        lambda env: vickrey_mix(env),
        lambda p, env, a: downward_closed_augmented(p, env, vickrey_mix(env), alpha=a),
        7, 10**4, rng)
    ok = dga_ok and ls_ok and dc_ok
    return ok, (f"dga-augmented(rscs) vs F2 over {count} equal-revenue instances: worst {worst:.3f} "
                f"(with 3se {worst_margin:.3f}) <= 6 [{'; '.join(detail)}]; "
                f"limited supply alpha_emp {float(a_ls):.3f} worst {float(w_ls):.3f} <= {float(a_ls) + 2:.3f}; "
                f"downward-closed alpha_emp {float(a_dc):.3f} worst {float(w_dc):.3f} <= {float(a_dc) + 7:.3f}")


# ---------------------------------------------------------------------------
# 8. error tolerance


def criterion_8():
    rng = np.random.default_rng(1008)
    beta = F(6)  # dga-augmented with rscs, verified in criterion 7
    bad_thm = bad_vr = 0
    regimes = {"consistent": 0, "robust": 0}
    gammas = [F(1), F(5, 4), F(3, 2), F(2), F(5, 2), F(3)]
    for _ in range(10**4):
        n = int(rng.integers(2, 5))
        v = small_rationals(n, rng, high=8, den=2)
        if rng.random() < 0.5:
            pred = eta_controlled(v, F(int(rng.integers(2, 9)), 2), rng, den=8)
        else:
            pred = _adversarial_predictions(v, int(rng.integers(0, n + 1)), rng)
        gamma = gammas[int(rng.integers(0, len(gammas)))]
        inner = digital_good_augmented(pred, rscs())
        c = theorem_errmod_check(inner, pred, v, gamma, f="f2", beta=beta)
        regimes[c.regime] += 1
        if not c.ok:
            bad_thm += 1
        wrapped = expected_payments(errmod(inner, pred, gamma), v)
        base = expected_payments(inner, approx(v, pred, gamma))
        bad_vr += sum(1 for w, b in zip(wrapped, base) if w < b / gamma)
    ok = bad_thm == bad_vr == 0 and min(regimes.values()) > 0
    return ok, f"10^4 (instance, gamma) pairs {regimes}: {bad_thm} bound failures, {bad_vr} per-bidder virtual-running failures"


# ---------------------------------------------------------------------------
# 9. bound curves


def criterion_9():
    ob, _ = randomized_bounds(exp_density, 1.0, 4.42)
    _, fb = randomized_bounds(exp_density, math.inf, 4.42)
    cons, rob = 1 / ob, 1 / fb
    ok = abs(cons - 1.677) <= 0.01 and abs(rob - 10.94) <= 0.01
    return ok, f"consistency {cons:.6f} (target 1.677 +- 0.01), robustness limit {rob:.6f} (target 10.94 +- 0.01)"


# ---------------------------------------------------------------------------
# 10. lower bound


def criterion_10():
    grid = np.logspace(0.001, 12, 2000)
    vals = np.array([limit_bound(N) for N in grid])
    above = bool((vals >= 3).all())
    tail = abs(limit_bound(1e12) - 3)
    rng = np.random.default_rng(1010)
    rel = {}
    for N in (4, 100, 10**4):
        mc = mc_verify_benchmark_mean(N, 10**6, rng)
        rel[N] = abs(mc - benchmark_mean(N)) / benchmark_mean(N)
    ok = above and tail <= 1e-5 and max(rel.values()) <= 0.005
    rel_txt = ", ".join(f"N={N}: {r:.2e}" for N, r in rel.items())
    return ok, f"bound >= 3 on {len(grid)} grid points={above}, |bound(1e12)-3|={tail:.1e}; MC relative error {rel_txt}"


# ---------------------------------------------------------------------------
# 11. determinism


def criterion_11():
    outs = []
    with tempfile.TemporaryDirectory() as tmp:
        for k, threads in enumerate(("1", "1", "2")):
            dest = os.path.join(tmp, f"run{k}.csv")
            env = dict(os.environ, AUGMECH_THREADS=threads)
            subprocess.run([sys.executable, "-m", "augmech.cli", "ratio", "--n", "8", "--trials", "200",
                            "--seed", "2024", "--out", dest], check=True, env=env)
            with open(dest, "rb") as fh:
                outs.append(fh.read())
    same = outs[0] == outs[1] == outs[2]
    return same and len(outs[0]) > 0, f"3 CLI runs (1, 1, 2 workers) bit-identical={same}, {len(outs[0])} bytes"


CRITERIA = [
    (1, "perfect consistency", criterion_1),
    (2, "truthfulness", criterion_2),
    (3, "feasibility", criterion_3),
    (4, "exact lemma bounds", criterion_4),
    (5, "benchmark oracles", criterion_5),
    (6, "dropping bidders and decomposition", criterion_6),
    (7, "parametric robustness", criterion_7),
    (8, "error tolerance", criterion_8),
    (9, "bound curve values", criterion_9),
    (10, "lower-bound formulas", criterion_10),
    (11, "CLI determinism", criterion_11),
]


def test_criterion_01_consistency():
    _run(*CRITERIA[0])


def test_criterion_02_truthfulness():
    _run(*CRITERIA[1])


def test_criterion_03_feasibility():
    _run(*CRITERIA[2])


def test_criterion_04_lemma_bounds():
    _run(*CRITERIA[3])


def test_criterion_05_benchmark_oracles():
    _run(*CRITERIA[4])


def test_criterion_06_dropping_and_decomposition():
    _run(*CRITERIA[5])


def test_criterion_07_parametric_robustness():
    _run(*CRITERIA[6])


def test_criterion_08_error_tolerance():
    _run(*CRITERIA[7])


def test_criterion_09_bound_curves():
    _run(*CRITERIA[8])


def test_criterion_10_lower_bound():
    _run(*CRITERIA[9])


def test_criterion_11_determinism():
    _run(*CRITERIA[10])


if __name__ == "__main__":
    failed = 0
    for num, title, body in CRITERIA:
        try:
            _run(num, title, body)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
