"""Exact geometry of the unit cycle.

The cycle has circumference 1 and is coordinatized by [-1/2, 1/2) with the
two endpoints joined; the joined endpoint carries the coordinate -1/2.  All
quantities are ``fractions.Fraction`` values, so every distance, cost and
probability in the package is exact.  Floats are rejected on input: they
cannot represent grid points such as 1/3 and would silently break the
equality-sensitive comparisons downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Tuple, Union

from .errors import DomainError

Rational = Fraction
HALF = Fraction(1, 2)

RationalLike = Union[Fraction, int, str]


def _as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise DomainError(
            f"float {value!r} is inexact; pass a Fraction, int or string")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational number: {value!r}") from exc


@dataclass(frozen=True, order=True)
class CyclePoint:
    """A point of the cycle, stored as an exact coordinate in [-1/2, 1/2).

    The coordinate 1/2 denotes the same point as -1/2 (the endpoints are
    joined) and is canonicalized to -1/2 on construction.  Coordinates
    outside [-1/2, 1/2] are rejected; use :func:`wrap` to reduce an
    arbitrary rational modulo 1.
    """

    coord: Fraction

    def __post_init__(self) -> None:
        c = _as_fraction(self.coord)
        if c == HALF:
            c = -HALF
        if not -HALF <= c < HALF:
            raise DomainError(f"coordinate {c} outside [-1/2, 1/2]")
        object.__setattr__(self, "coord", c)

    def __str__(self) -> str:
        return str(self.coord)

    def __repr__(self) -> str:
        return f"CyclePoint({self.coord})"


def wrap(value: RationalLike) -> CyclePoint:
    """Reduce an arbitrary rational modulo 1 into [-1/2, 1/2)."""
    x = _as_fraction(value)
    return CyclePoint(x - math.floor(x + HALF))


def cycle_distance(a: CyclePoint, b: CyclePoint) -> Fraction:
    """Shortest-arc distance min(|b-a|, 1-|b-a|); always in [0, 1/2]."""
    d = abs(b.coord - a.coord)
    return min(d, 1 - d)


def cut_distance(a: CyclePoint, b: CyclePoint) -> Fraction:
    """Segment distance |b-a|: the cycle distance with paths through the
    joined endpoint -1/2 forbidden.  Never smaller than cycle_distance."""
    return abs(b.coord - a.coord)


class MetricKind(Enum):
    """Selects which of the two distance functions an operation uses."""

    CYCLE = "cycle"
    CUT = "cut"


_DISTANCE = {MetricKind.CYCLE: cycle_distance, MetricKind.CUT: cut_distance}


def distance(a: CyclePoint, b: CyclePoint, metric: MetricKind) -> Fraction:
    return _DISTANCE[metric](a, b)


def antipode(v: CyclePoint) -> CyclePoint:
    """The unique point at cycle distance exactly 1/2 from v."""
    return wrap(v.coord + HALF)


def shift(v: CyclePoint, delta: RationalLike) -> CyclePoint:
    """Rotate v clockwise by delta (an automorphism of the cycle)."""
    return wrap(v.coord + _as_fraction(delta))


def reflect(v: CyclePoint) -> CyclePoint:
    """Mirror v through the point 0 (an automorphism of the cycle)."""
    return wrap(-v.coord)


PointLike = Union[CyclePoint, RationalLike]


def _as_point(value: PointLike) -> CyclePoint:
    return value if isinstance(value, CyclePoint) else CyclePoint(_as_fraction(value))


class Lottery:
    """A finite probability distribution over cycle points.

    Entries with equal points are merged and zero-probability entries are
    dropped on construction; the remaining probabilities must sum to
    exactly 1.
    """

    __slots__ = ("_entries",)

    def __init__(self, weights: Union[Mapping[PointLike, RationalLike],
                                      Iterable[Tuple[PointLike, RationalLike]]]):
        pairs = weights.items() if isinstance(weights, Mapping) else weights
        merged: dict[CyclePoint, Fraction] = {}
        for pt, pr in pairs:
            point = _as_point(pt)
            prob = _as_fraction(pr)
            if not 0 <= prob <= 1:
                raise DomainError(f"probability {prob} outside [0, 1]")
            merged[point] = merged.get(point, Fraction(0)) + prob
        total = sum(merged.values(), Fraction(0))
        if total != 1:
            raise DomainError(f"probabilities sum to {total}, expected 1")
        if any(p > 1 for p in merged.values()):
            raise DomainError("a merged probability exceeds 1")
        self._entries = tuple(sorted(
            (pt, pr) for pt, pr in merged.items() if pr != 0))

    @property
    def entries(self) -> Tuple[Tuple[CyclePoint, Fraction], ...]:
        return self._entries

    @property
    def support(self) -> Tuple[CyclePoint, ...]:
        return tuple(pt for pt, _ in self._entries)

    def probability(self, pt: PointLike) -> Fraction:
        point = _as_point(pt)
        for p, pr in self._entries:
            if p == point:
                return pr
        return Fraction(0)

    def as_dict(self) -> dict[CyclePoint, Fraction]:
        return dict(self._entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Lottery) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def __repr__(self) -> str:
        inner = ", ".join(f"{pt}: {pr}" for pt, pr in self._entries)
        return f"Lottery({{{inner}}})"


def degenerate(pt: PointLike) -> Lottery:
    """The lottery that selects a single point with probability 1."""
    return Lottery({_as_point(pt): Fraction(1)})


class Profile:
    """The tuple of all agents' reported points.

    For odd n the agents are indexed -k..k with k = (n-1)/2; report i is
    stored at position i+k.  Profiles of any size n >= 1 can be built (the
    cost operations and the random-dictator mechanism accept them); the
    operations that need the symmetric indexing require odd n and say so.
    """

    __slots__ = ("_reports",)

    def __init__(self, reports: Iterable[PointLike]):
        pts = tuple(_as_point(r) for r in reports)
        if not pts:
            raise DomainError("a profile needs at least one agent")
        self._reports = pts

    @property
    def reports(self) -> Tuple[CyclePoint, ...]:
        return self._reports

    @property
    def n(self) -> int:
        return len(self._reports)

    @property
    def k(self) -> int:
        if self.n % 2 == 0:
            raise DomainError(f"n={self.n} is even; k is defined for odd n")
        return (self.n - 1) // 2

    def agent(self, i: int) -> CyclePoint:
        """Report of agent i, for i in -k..k (odd n only)."""
        k = self.k
        if not -k <= i <= k:
            raise DomainError(f"agent index {i} outside -{k}..{k}")
        return self._reports[i + k]

    def replace(self, position: int, pt: PointLike) -> "Profile":
        """A copy with the report at the given storage position swapped."""
        reports = list(self._reports)
        reports[position] = _as_point(pt)
        return Profile(reports)

    def sorted(self) -> "Profile":
        return Profile(sorted(self._reports))

    def coords(self) -> Tuple[Fraction, ...]:
        return tuple(r.coord for r in self._reports)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Profile) and self._reports == other._reports

    def __hash__(self) -> int:
        return hash(self._reports)

    def __len__(self) -> int:
        return len(self._reports)

    def __iter__(self):
        return iter(self._reports)

    def __repr__(self) -> str:
        return f"Profile(({', '.join(str(r) for r in self._reports)}))"


def expected_cost(v: CyclePoint, lottery: Lottery, metric: MetricKind) -> Fraction:
    """Expected distance from v to the lottery outcome."""
    dist = _DISTANCE[metric]
    return sum((pr * dist(v, pt) for pt, pr in lottery.entries), Fraction(0))


def social_cost(b: Profile, lottery: Lottery, metric: MetricKind) -> Fraction:
    """Sum of the agents' expected costs; linear in the probabilities."""
    return sum((expected_cost(r, lottery, metric) for r in b.reports), Fraction(0))


def point_social_cost(b: Profile, v: CyclePoint, metric: MetricKind) -> Fraction:
    """Social cost of the degenerate lottery at v."""
    dist = _DISTANCE[metric]
    return sum((dist(r, v) for r in b.reports), Fraction(0))


def breakpoints(b: Profile) -> Tuple[CyclePoint, ...]:
    """Reports and their antipodes, sorted and deduplicated.

    The social cost under the cycle metric is piecewise linear in the
    location, and its slope can only change where the location crosses a
    report or a report's antipode, so the minimum is attained here.
    """
    pts = set(b.reports) | {antipode(r) for r in b.reports}
    return tuple(sorted(pts))


def optimal_cost(b: Profile) -> Tuple[Fraction, CyclePoint]:
    """Exact minimum of the social cost over the whole cycle.

    Returns the cost and a minimizing point; ties are broken towards the
    minimizer with the smallest coordinate, for reproducibility.
    """
    best: Fraction | None = None
    best_pt: CyclePoint | None = None
    for v in breakpoints(b):
        cost = point_social_cost(b, v, MetricKind.CYCLE)
        if best is None or cost < best:
            best, best_pt = cost, v
    assert best is not None and best_pt is not None
    return best, best_pt


def rescale_profile(raw: Sequence[RationalLike], z: RationalLike) -> Profile:
    """Map reports on a cycle of circumference z onto the unit cycle.

    Every raw value must lie in [0, z); it is divided by z and re-centered
    into [-1/2, 1/2).  Mechanism outputs on the rescaled profile correspond
    to outputs on the original cycle via the inverse map.
    """
    scale = _as_fraction(z)
    if scale <= 0:
        raise DomainError(f"cycle length must be positive, got {scale}")
    points = []
    for value in raw:
        x = _as_fraction(value)
        if not 0 <= x < scale:
            raise DomainError(f"raw coordinate {x} outside [0, {scale})")
        points.append(wrap(x / scale))
    return Profile(points)
