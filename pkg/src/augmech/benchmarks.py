"""Revenue benchmarks: OPT, F2, maxV, F2l, envy-free optimum and its variants."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .env import ZERO, Environment, as_vector, digital_good, linear_max


def _desc(v: Sequence) -> tuple[Fraction, ...]:
    return tuple(sorted(as_vector(v), reverse=True))


def opt(v: Sequence, env: Environment) -> Fraction:
    return linear_max(as_vector(v), env)[1]


def f2(v: Sequence) -> Fraction:
    s = _desc(v)
    if len(s) < 2:
        raise ValueError("F2 needs at least two bidders")
    return max(k * s[k - 1] for k in range(2, len(s) + 1))


def f1(v: Sequence) -> Fraction:
    """Best single-price revenue with no minimum on the number of winners."""
    s = _desc(v)
    return max((k * s[k - 1] for k in range(1, len(s) + 1)), default=ZERO)


def maxv(v: Sequence) -> Fraction:
    s = _desc(v)
    if len(s) < 2:
        raise ValueError("maxV needs at least two bidders")
    return max(k * s[k] for k in range(1, len(s)))


def f2l(v: Sequence, supply: int) -> Fraction:
    s = _desc(v)
    if len(s) < 2:
        raise ValueError("F2l needs at least two bidders")
    if supply < 2:
        raise ValueError("F2l needs supply >= 2")
    return max(k * s[k - 1] for k in range(2, min(supply, len(s)) + 1))


# ---------------------------------------------------------------------------
# ironing


@dataclass(frozen=True)
class Envelope:
    R: tuple[Fraction, ...]
    phi: tuple[Fraction, ...]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def envelope(v: Sequence) -> Envelope:
    """Smallest nondecreasing concave R on 0..n with R(0)=0 and R(j) >= j*v_j.

    Upper hull of the revenue curve by monotone chain, then flattened after
    its peak.
    """
    s = _desc(v)
    n = len(s)
    pts = [(0, ZERO)] + [(j, j * s[j - 1]) for j in range(1, n + 1)]
    hull: list[tuple[int, Fraction]] = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    R = [ZERO] * (n + 1)
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        slope = (y1 - y0) / (x1 - x0)
        for j in range(x0, x1 + 1):
            R[j] = y0 + slope * (j - x0)
    for j in range(1, n + 1):
        R[j] = max(R[j], R[j - 1])
    phi = tuple(R[j] - R[j - 1] for j in range(1, n + 1))
    return Envelope(tuple(R), phi)


def envelope_formula(v: Sequence) -> tuple[Fraction, ...]:
    """R(0..n) straight from the double-max chord formula, O(n^4)."""
    s = _desc(v)
    n = len(s)
    rev = [None] + [j * s[j - 1] for j in range(1, n + 1)]
    R = [ZERO]
    for j in range(1, n + 1):
        best = ZERO
        for l in range(1, j + 1):
            for i in range(1, l + 1):
                for k in range(l, n + 1):
                    if k == i:
                        val = rev[i]
                    else:
                        val = rev[i] * Fraction(k - l, k - i) + rev[k] * Fraction(l - i, k - i)
                    best = max(best, val)
        R.append(best)
    return tuple(R)


def virtual_values(v: Sequence) -> tuple[Fraction, ...]:
    return envelope(v).phi


def efo(v: Sequence, env: Environment) -> Fraction:
    return linear_max(envelope(v).phi, env)[1]


def top_replaced(v: Sequence, m: int) -> tuple[Fraction, ...]:
    """``v^(m)``: the descending profile with its top ``m`` entries set to ``v_(m)``."""
    s = _desc(v)
    if not 1 <= m <= len(s):
        raise ValueError(f"m={m} out of range for n={len(s)}")
    return (s[m - 1],) * m + s[m:]


def efom(v: Sequence, m: int, env: Environment) -> Fraction:
    return efo(top_replaced(v, m), env)


def efo2(v: Sequence, env: Environment) -> Fraction:
    return efom(v, 2, env)


def ef_revenue(x: Sequence, v: Sequence) -> Fraction:
    """Envy-free revenue of a monotone allocation ``x`` listed along descending ``v``."""
    x = as_vector(x)
    v = as_vector(v)
    if len(x) != len(v):
        raise ValueError("dimension mismatch")
    order = sorted(range(len(v)), key=lambda i: (-v[i], i))
    xs = [x[i] for i in order] + [ZERO]
    vs = [v[i] for i in order]
    if any(xs[j] < xs[j + 1] for j in range(len(vs) - 1)):
        raise ValueError("allocation is not monotone along descending values")
    return sum(((j + 1) * vs[j] * (xs[j] - xs[j + 1]) for j in range(len(vs))), ZERO)


def brute_efo(v: Sequence, env: Environment, grid: int) -> Fraction:
    """Best envy-free revenue over monotone feasible allocations on a 1/grid lattice.

    Uses the identity EF^x(v) = sum_j x_j (j v_j - (j-1) v_{j-1}); the maximum
    is found by dynamic programming over (current level, running sum) with
    exact integer arithmetic, so no ironing is involved.
    """
    s = _desc(v)
    n = len(s)
    if n > 4:
        raise ValueError("brute_efo is limited to n <= 4")
    if env.n != n:
        raise ValueError("dimension mismatch")
    w = [(j + 1) * s[j] - (j * s[j - 1] if j else ZERO) for j in range(n)]
    den = lcm(*(wi.denominator for wi in w))
    wi_int = np.array([int(wi * den) for wi in w], dtype=np.int64)
    if np.abs(wi_int).max(initial=0) * grid * n >= 2**62:
        raise OverflowError("weights too large for the integer DP")
    caps = [int((env.c(k) * grid).__floor__()) for k in range(1, n + 1)]
    levels = np.arange(grid + 1)
    neg = np.iinfo(np.int64).min // 4
    smax = n * grid
    # best[a, S]: best value with last level a and running sum S
    best = np.full((grid + 1, smax + 1), neg, dtype=np.int64)
    ok = levels <= caps[0]
    best[levels[ok], levels[ok]] = wi_int[0] * levels[ok]
    for j in range(1, n):
        # suffix max over previous level a >= a'
        suf = np.maximum.accumulate(best[::-1], axis=0)[::-1]
        new = np.full_like(best, neg)
        for a in range(grid + 1):
            row = suf[a]
            shifted = np.full(smax + 1, neg, dtype=np.int64)
            shifted[a:] = row[: smax + 1 - a]
            shifted[caps[j] + 1 :] = neg
            valid = shifted > neg // 2
            new[a, valid] = shifted[valid] + wi_int[j] * a
        best = new
    top = int(best.max())
    return Fraction(top, den * grid)


# ---------------------------------------------------------------------------
# registry used by the harness and the CLI

BENCHMARKS = ("opt", "f2", "f1", "maxv", "f2l", "efo", "efo2", "efo3", "v2x2")


def evaluate(name: str, v: Sequence, env: Environment | None = None) -> Fraction:
    v = as_vector(v)
    env = env or digital_good(len(v))
    name = name.lower()
    if name == "opt":
        return opt(v, env)
    if name == "f2":
        return f2(v)
    if name == "f1":
        return f1(v)
    if name == "maxv":
        return maxv(v)
    if name == "f2l":
        if env.supply is None:
            raise ValueError("f2l needs a limited-supply environment")
        return f2l(v, env.supply)
    if name == "efo":
        return efo(v, env)
    if name.startswith("efo") and name[3:].isdigit():
        return efom(v, int(name[3:]), env)
    if name == "v2x2":
        return 2 * _desc(v)[1]
    raise ValueError(f"unknown benchmark {name!r}")
