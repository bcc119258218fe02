"""Vectorized float evaluation of RSCS and the digital-good augmented mechanism.

The exact engine builds a step rule per bidder per coin pattern, which is
too slow for 10^5-instance sweeps.  Here every coin pattern of an instance is
a row of a boolean matrix and cost sharing reduces to running counts over
the values in descending order.  Tests cross-check this path against the exact engine.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

EXACT_LIMIT = 12
# k * s_k >= F is often an exact tie in rationals (e.g. 1000/k values); floats must not break it
RTOL = 1e-12


def all_patterns(n: int) -> np.ndarray:
    return np.array(list(itertools.product((False, True), repeat=n)), dtype=bool)


def _side_payments(vs: np.ndarray, side: np.ndarray, rank: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Cost sharing of ``F`` among one side; values ``vs`` are sorted descending."""
    k = rank + 1
    ok = side & (k * vs >= F[..., None] * (1 - RTOL)) & (vs > 0)
    kstar = np.where(ok, k, 0).max(axis=-1)
    price = np.divide(F, kstar, out=np.zeros_like(F), where=kstar > 0)
    wins = side & (rank < kstar[..., None])
    return np.where(wins, price[..., None], 0.0)


def rscs_payment_matrix(values, patterns: np.ndarray) -> np.ndarray:
    """Payments of RSCS under each coin pattern: ``(P, n)``, or ``(B, P, n)`` for a batch of value rows.

    Pattern columns refer to positions in descending value order.  Because the
    coins are i.i.d. this changes nothing in distribution, and it lets the
    rank of a bidder within its side be a running count instead of a sort.
    The returned columns are mapped back to bidder indices.
    """
    v = np.asarray(values, dtype=float)
    order = np.argsort(-v, axis=-1, kind="stable")
    vs = np.take_along_axis(v, order, axis=-1)[..., None, :]
    a, b = patterns, ~patterns
    ra = np.cumsum(a, axis=-1) - 1
    rb = np.cumsum(b, axis=-1) - 1
    fa = np.where(a, (ra + 1) * vs, 0.0).max(axis=-1)
    fb = np.where(b, (rb + 1) * vs, 0.0).max(axis=-1)
    pay_sorted = _side_payments(vs, a, ra, fb) + _side_payments(vs, b, rb, fa)
    out = np.empty_like(pay_sorted)
    idx = np.broadcast_to(order[..., None, :], pay_sorted.shape)
    np.put_along_axis(out, idx, pay_sorted, axis=-1)
    return out


def rscs_expected_revenue_batch(values: np.ndarray) -> np.ndarray:
    """Exact (enumerated) expected RSCS revenue for each row of a ``(B, n)`` array."""
    values = np.asarray(values, dtype=float)
    pats = all_patterns(values.shape[-1])
    return rscs_payment_matrix(values, pats).sum(axis=-1).mean(axis=-1)


@dataclass(frozen=True)
class FastRevenue:
    mean: float
    se: float
    exact: bool


def rscs_expected_payments(values: Sequence[float], rng: np.random.Generator | None = None,
                           samples: int = 1024):
    """Per-bidder expected payments and the per-pattern payment matrix used."""
    n = len(values)
    if n <= EXACT_LIMIT:
        pats = all_patterns(n)
    else:
        if rng is None:
            raise ValueError("sampling needs an rng")
        pats = rng.integers(0, 2, size=(samples, n)).astype(bool)
    pay = rscs_payment_matrix(values, pats)
    return pay.mean(axis=0), pay, n <= EXACT_LIMIT


def dga_augmented_revenue(values: Sequence, predictions: Sequence, alpha: Fraction = Fraction(4),
                          rng: np.random.Generator | None = None, samples: int = 1024) -> FastRevenue:
    """Expected revenue of the digital-good augmented mechanism with RSCS inside."""
    values = [Fraction(x) for x in values]
    predictions = [Fraction(x) for x in predictions]
    wrong = np.array([v != p for v, p in zip(values, predictions)])
    accept = np.array([v >= p for v, p in zip(values, predictions)])
    vhat = np.array([float(p) for p in predictions])
    posted = np.where(accept, vhat, 0.0)
    others_wrong = wrong.sum() - wrong
    use_bb = others_wrong > 0
    if use_bb.any():
        _, pay, exact = rscs_expected_payments([float(v) for v in values], rng, samples)
        per_row = pay[:, use_bb].sum(axis=1)
        bb_mean = float(per_row.mean())
        bb_se = 0.0 if exact else float(per_row.std(ddof=1) / np.sqrt(len(per_row)))
    else:
        bb_mean, bb_se, exact = 0.0, 0.0, True
    a = float(alpha)
    w2, w1 = a / (a + 2), 2 / (a + 2)
    dga2 = float(posted[~use_bb].sum()) + bb_mean
    dga1 = float(posted.sum())
    return FastRevenue(w2 * dga2 + w1 * dga1, w2 * bb_se, exact)


def f2_batch(values: np.ndarray) -> np.ndarray:
    """F^(2) for each row of a ``(B, n)`` float array."""
    s = -np.sort(-np.asarray(values, dtype=float), axis=-1)
    k = np.arange(1, s.shape[-1] + 1)
    return (k[1:] * s[..., 1:]).max(axis=-1)
