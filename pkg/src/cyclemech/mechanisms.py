"""The randomized facility-location mechanisms and their approximation ratios.

Two building blocks are implemented: the random dictator, which picks a
reported point with probability proportional to how many agents report it,
and the proportional-circle-distance rule, which picks each agent's report
with probability equal to the length of the arc opposing that agent.  A
mixture averages the output lotteries of two mechanisms pointwise, which is
exactly the distribution of "flip a fair coin, run one of the two".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import MechanismError
from .geometry import (CyclePoint, Lottery, MetricKind, Profile, Rational,
                       optimal_cost, social_cost)

RD = "rd"
PCD = "pcd"


@dataclass(frozen=True)
class Mix:
    """Equal-weight mixture of two mechanisms (applied to lotteries)."""

    first: "MechanismId"
    second: "MechanismId"

    def __str__(self) -> str:
        return f"{self.first}+{self.second}"


MechanismId = Union[str, Mix]

RD_PCD = Mix(RD, PCD)


@dataclass(frozen=True)
class ApxResult:
    """Approximation-ratio evaluation of a mechanism on one profile."""

    ratio: Rational
    mechanism_sc: Rational
    opt: Rational
    opt_point: CyclePoint


def random_dictator(b: Profile) -> Lottery:
    """Each distinct reported point gets probability (#reporters)/n."""
    n = b.n
    weights: dict[CyclePoint, Fraction] = {}
    for r in b.reports:
        weights[r] = weights.get(r, Fraction(0)) + Fraction(1, n)
    return Lottery(weights)


def pcd(b: Profile) -> Lottery:
    """Proportional circle distance, defined for odd n >= 3.

    Order the reports clockwise starting from the joined endpoint -1/2
    (ties between equal reports do not affect the outcome).  The arc
    opposing the agent at position p runs from the report at position p+k
    to the report at position p+k+1 (cyclically), i.e. it is one of the
    gaps between consecutive ordered reports; the gaps tile the cycle, so
    the arc lengths already sum to 1.
    """
    n = b.n
    if n % 2 == 0:
        raise MechanismError(f"pcd needs an odd number of agents, got n={n}")
    if n < 3:
        raise MechanismError(f"pcd needs at least 3 agents, got n={n}")
    k = (n - 1) // 2
    order = sorted(b.reports)
    gaps = [order[p + 1].coord - order[p].coord for p in range(n - 1)]
    gaps.append(1 - (order[-1].coord - order[0].coord))  # arc through -1/2
    weights: dict[CyclePoint, Fraction] = {}
    for p in range(n):
        prob = gaps[(p + k) % n]
        if prob:
            weights[order[p]] = weights.get(order[p], Fraction(0)) + prob
    return Lottery(weights)


def mix(l1: Lottery, l2: Lottery) -> Lottery:
    """Pointwise average of two lotteries over the union of supports."""
    points = set(l1.support) | set(l2.support)
    return Lottery({pt: (l1.probability(pt) + l2.probability(pt)) / 2
                    for pt in points})


def apply(m: MechanismId, b: Profile) -> Lottery:
    """Run mechanism m on profile b."""
    if m == RD:
        return random_dictator(b)
    if m == PCD:
        return pcd(b)
    if isinstance(m, Mix):
        return mix(apply(m.first, b), apply(m.second, b))
    raise MechanismError(f"unknown mechanism {m!r}")


def parse_mechanism(text: str) -> MechanismId:
    """Parse 'rd', 'pcd' or a '+'-joined mixture such as 'rd+pcd'."""
    parts = [p.strip().lower() for p in text.split("+")]
    if not all(parts):
        raise MechanismError(f"cannot parse mechanism {text!r}")
    for p in parts:
        if p not in (RD, PCD):
            raise MechanismError(f"unknown mechanism {p!r}")
    mech: MechanismId = parts[0]
    for p in parts[1:]:
        mech = Mix(mech, p)
    return mech


def approximation_ratio(m: MechanismId, b: Profile) -> ApxResult:
    """Social cost of m's outcome divided by the optimal cost.

    A zero optimum means all agents report the same point; both mechanisms
    are peaks-only, so they return that point with probability 1 and the
    ratio is 1 by convention.
    """
    opt, opt_point = optimal_cost(b)
    mechanism_sc = social_cost(b, apply(m, b), MetricKind.CYCLE)
    if opt == 0:
        return ApxResult(Fraction(1), mechanism_sc, opt, opt_point)
    return ApxResult(mechanism_sc / opt, mechanism_sc, opt, opt_point)
