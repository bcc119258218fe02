"""Name-based construction of mechanisms for the CLI and the experiment drivers."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import augmented as aug
from .baseline import make_blackbox, posted_price, vickrey_l
from .env import Environment
from .errortol import errmod
from .mechanism import Mechanism
from .online import ArrivalOrder, osap

MECHANISMS = (
    "posted", "vickrey", "rscs", "lsa-blackbox", "vickrey-mix",
    "dga1", "dga2", "dga-augmented",
    "lsa1", "lsa2", "lsa-augmented",
    "rank2-1", "insensitive", "rank2-4", "dc-augmented",
    "osap",
)

DEFAULT_BLACKBOX = {"digital": "rscs", "supply": "lsa-blackbox", "cap": "vickrey-mix"}


@dataclass(frozen=True)
class MechanismSpec:
    name: str
    blackbox: str | None = None
    alpha: Fraction | None = None
    gamma: Fraction | None = None
    order: tuple[int, ...] | None = None

    def build(self, predictions: Sequence, env: Environment) -> Mechanism:
        m = build_mechanism(self.name, predictions, env, self.blackbox, self.alpha, self.order)
        return errmod(m, predictions, self.gamma) if self.gamma is not None else m


def build_mechanism(name: str, predictions: Sequence, env: Environment, blackbox: str | None = None,
                    alpha=None, order: tuple[int, ...] | None = None) -> Mechanism:
    bb_name = blackbox or DEFAULT_BLACKBOX[env.kind]
    if name == "posted":
        return posted_price(predictions)
    if name == "vickrey":
        return vickrey_l(env.supply or 1, env)
    if name in ("rscs", "lsa-blackbox", "vickrey-mix"):
        return make_blackbox(name, env)
    if name == "dga1":
        return aug.mech_dga1(predictions)
    if name == "dga2":
        return aug.mech_dga2(predictions, make_blackbox(bb_name, env))
    if name == "dga-augmented":
        return aug.digital_good_augmented(predictions, make_blackbox(bb_name, env), alpha)
    if name == "lsa1":
        return aug.mech_lsa1(predictions, env)
    if name == "lsa2":
        return aug.mech_lsa2(predictions, env, make_blackbox(bb_name, env))
    if name == "lsa-augmented":
        return aug.limited_efo_augmented(predictions, env, make_blackbox(bb_name, env), alpha)
    if name == "rank2-1":
        return aug.mech_rank2_1(predictions, env, make_blackbox(bb_name, env))
    if name == "insensitive":
        return aug.mech_insensitive(predictions, env)
    if name == "rank2-4":
        return aug.mech_rank2_4(predictions, env)
    if name == "dc-augmented":
        return aug.downward_closed_augmented(predictions, env, make_blackbox(bb_name, env), alpha)
    if name == "osap":
        if env.kind != "digital":
            raise ValueError("the online mechanism is defined for digital goods only")
        return osap(predictions, order=ArrivalOrder(order))
    raise ValueError(f"unknown mechanism {name!r}; choose from {', '.join(MECHANISMS)}")
