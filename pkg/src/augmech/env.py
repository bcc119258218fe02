"""Value profiles, bidder orderings and symmetric feasibility environments.

Every quantity that a mechanism branches on is an exact ``Fraction``.  An
environment is a symmetric downward-closed convex set described by concave
caps ``c(k)`` on the sum of the ``k`` largest allocation entries.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(x) -> Fraction:
    """Exact conversion; strings may be ``"p/q"`` or decimal literals."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # decimal repr keeps 0.1 as 1/10 rather than its binary expansion
        return Fraction(repr(x))
    return Fraction(x)


def as_vector(xs: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_fraction(x) for x in xs)


def descending_order(values: Sequence) -> tuple[int, ...]:
    """Indices sorted by value, largest first; ties go to the lower index."""
    return tuple(sorted(range(len(values)), key=lambda i: (-values[i], i)))


def beats(i: int, bi, k: int, bk) -> bool:
    """True when bidder ``i`` bidding ``bi`` ranks ahead of ``k`` bidding ``bk``."""
    return bi > bk or (bi == bk and i < k)


@dataclass(frozen=True)
class ValueProfile:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", as_vector(self.values))
        if not self.values:
            raise ValueError("a profile needs at least one bidder")
        if any(v < 0 for v in self.values):
            raise ValueError("values must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def order(self) -> tuple[int, ...]:
        return descending_order(self.values)

    def sorted(self) -> tuple[Fraction, ...]:
        return tuple(sorted(self.values, reverse=True))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class PredictionProfile(ValueProfile):
    """Predicted values together with their descending order ``sigma``.

    ``sigma[k]`` is the bidder holding the (k+1)-th largest prediction.  Ties
    are broken by bidder index, the same rule used for the value order, so the
    two orders agree whenever both the values and the predictions tie.
    """

    @property
    def sigma(self) -> tuple[int, ...]:
        return self.order

    @property
    def rank(self) -> tuple[int, ...]:
        """Inverse of ``sigma``: position of each bidder in prediction order."""
        inv = [0] * self.n
        for pos, i in enumerate(self.sigma):
            inv[i] = pos
        return tuple(inv)


def as_profile(values, cls=ValueProfile):
    if isinstance(values, cls):
        return values
    if isinstance(values, ValueProfile):
        return cls(values.values)
    return cls(tuple(values))


# ---------------------------------------------------------------------------
# environments


@dataclass(frozen=True)
class Environment:
    """Symmetric cap environment over ``n`` bidders.

    ``cap[k-1]`` bounds the sum of the ``k`` largest entries of an allocation.
    ``kind`` is kept only for display and serialization.
    """

    cap: tuple[Fraction, ...]
    kind: str = "cap"
    supply: int | None = None

    def __post_init__(self):
        cap = as_vector(self.cap)
        object.__setattr__(self, "cap", cap)
        if not cap:
            raise ValueError("environment needs n >= 1")
        prev, prev_inc = ZERO, None
        for k, ck in enumerate(cap, start=1):
            if ck > k:
                raise ValueError(f"cap c({k})={ck} exceeds {k}")
            inc = ck - prev
            if inc < 0:
                raise ValueError("cap must be nondecreasing")
            if prev_inc is not None and inc > prev_inc:
                raise ValueError("cap must be concave")
            prev, prev_inc = ck, inc

    @property
    def n(self) -> int:
        return len(self.cap)

    def c(self, k: int) -> Fraction:
        return ZERO if k == 0 else self.cap[k - 1]

    @property
    def singletons_feasible(self) -> bool:
        return self.cap[0] >= 1

    def to_json(self) -> dict:
        if self.kind == "digital":
            return {"kind": "digital"}
        if self.kind == "supply":
            return {"kind": "supply", "l": self.supply}
        return {"kind": "cap", "cap": [fraction_str(c) for c in self.cap]}

    def __str__(self):
        if self.kind == "digital":
            return f"DigitalGood(n={self.n})"
        if self.kind == "supply":
            return f"LimitedSupply(n={self.n}, l={self.supply})"
        return f"SymmetricCap({', '.join(map(str, self.cap))})"


def digital_good(n: int) -> Environment:
    return Environment(tuple(Fraction(k) for k in range(1, n + 1)), kind="digital")


def limited_supply(n: int, supply: int) -> Environment:
    if not 1 <= supply:
        raise ValueError("supply must be a positive integer")
    cap = tuple(Fraction(min(k, supply)) for k in range(1, n + 1))
    return Environment(cap, kind="supply", supply=supply)


def symmetric_cap(cap: Sequence) -> Environment:
    return Environment(as_vector(cap), kind="cap")


def env_from_json(spec: dict, n: int) -> Environment:
    kind = spec.get("kind", "digital")
    if kind == "digital":
        return digital_good(n)
    if kind == "supply":
        return limited_supply(n, int(spec["l"]))
    if kind == "cap":
        cap = as_vector(spec["cap"])
        if len(cap) != n:
            raise ValueError("cap length must equal n")
        return symmetric_cap(cap)
    raise ValueError(f"unknown environment kind {kind!r}")


def fraction_str(x: Fraction) -> str:
    x = as_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# oracles


def _check_dim(x, env: Environment):
    if len(x) != env.n:
        raise ValueError(f"dimension {len(x)} does not match environment n={env.n}")


def is_feasible(x: Sequence, env: Environment) -> bool:
    _check_dim(x, env)
    x = as_vector(x)
    if any(xi < 0 or xi > 1 for xi in x):
        return False
    total = ZERO
    for k, xk in enumerate(sorted(x, reverse=True), start=1):
        total += xk
        if total > env.c(k):
            return False
    return True


def linear_max(w: Sequence, env: Environment) -> tuple[tuple[Fraction, ...], Fraction]:
    """Maximize ``sum(w_i x_i)`` over the environment.

    Greedy fill in descending weight order, then equal weights share their
    block's mass evenly so the allocation is monotone along the weight order
    and ties receive identical service.
    """
    _check_dim(w, env)
    w = as_vector(w)
    if any(wi < 0 for wi in w):
        raise ValueError("weights must be nonnegative")
    order = descending_order(w)
    x = [ZERO] * len(w)
    filled = ZERO
    for k, i in enumerate(order, start=1):
        if w[i] == 0:
            break
        xi = min(ONE, env.c(k) - filled)
        x[i] = xi
        filled += xi
    # average within blocks of equal weight
    start = 0
    while start < len(order):
        end = start
        while end + 1 < len(order) and w[order[end + 1]] == w[order[start]]:
            end += 1
        if end > start:
            block = order[start : end + 1]
            avg = sum((x[i] for i in block), ZERO) / len(block)
            for i in block:
                x[i] = avg
        start = end + 1
    value = sum((wi * xi for wi, xi in zip(w, x)), ZERO)
    return tuple(x), value


def count_wrong(values: Sequence, predictions: Sequence) -> int:
    if len(values) != len(predictions):
        raise ValueError("dimension mismatch")
    return sum(1 for v, p in zip(values, predictions) if v != p)


def count_wrong_excluding(values: Sequence, predictions: Sequence, i: int) -> int:
    """Wrong predictions among bidders other than ``i``; ``values[i]`` is never read."""
    if len(values) != len(predictions):
        raise ValueError("dimension mismatch")
    return sum(1 for k, (v, p) in enumerate(zip(values, predictions)) if k != i and v != p)


def wrong_bidders_excluding(values: Sequence, predictions: Sequence, i: int) -> list[int]:
    return [k for k, (v, p) in enumerate(zip(values, predictions)) if k != i and v != p]
