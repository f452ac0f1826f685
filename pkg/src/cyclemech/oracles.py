"""Slow, independent cross-validation paths.

Everything here recomputes a result by a method deliberately different
from the production code: dense scans instead of breakpoint evaluation,
raw enumeration instead of symmetry reduction, seeded random sampling for
the reduction machinery.  The CLI exposes them behind --oracle and the
test suite leans on them for oracle-vs-fast-path equality checks.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterator, Optional, Tuple

from .cutbound import SegmentProfile
from .errors import ConfigError
from .geometry import (HALF, CyclePoint, MetricKind, Profile, Rational,
                       point_social_cost, wrap)
from .search import (GridSpec, MechanismLike, SearchConfig, _ratio_of,
                     _tables)
from itertools import product


def optimal_cost_scan(b: Profile, refine: int = 1) -> Tuple[Fraction, CyclePoint]:
    """Optimum by scanning every multiple of 1/L for L = 2 * refine * lcm
    of the report denominators.  The scan grid contains every report and
    every antipode, so the true minimum is among the scanned points."""
    denominators = [r.coord.denominator for r in b.reports]
    L = 2 * max(1, refine) * math.lcm(*denominators)
    best: Optional[Fraction] = None
    best_pt: Optional[CyclePoint] = None
    for j in range(L):
        v = wrap(Fraction(j, L))
        cost = point_social_cost(b, v, MetricKind.CYCLE)
        if best is None or cost < best or (cost == best and v < best_pt):
            best, best_pt = cost, v
    assert best is not None and best_pt is not None
    return best, best_pt


def worst_case_raw(c: SearchConfig) -> Tuple[Fraction, Profile, int]:
    """Worst ratio over all l^n raw ordered profiles, no symmetry reduction.

    Returns (max ratio, lexicographically smallest raw witness, count).
    Refuses configurations whose raw count exceeds the budget.
    """
    l = c.grid.l
    raw_count = l ** c.n
    if raw_count > c.effective_budget():
        raise ConfigError(
            f"raw enumeration of {raw_count} profiles exceeds the budget")
    points = _tables(l).points
    best: Optional[Fraction] = None
    witness: Optional[Profile] = None
    examined = 0
    for combo in product(points, repeat=c.n):
        if c.max_distinct is not None and len(set(combo)) > c.max_distinct:
            continue
        profile = Profile(combo)
        examined += 1
        ratio = _ratio_of(c.mechanism, profile)
        if (best is None or ratio > best
                or (ratio == best and profile.coords() < witness.coords())):
            best, witness = ratio, profile
    if best is None:
        raise ConfigError("search space is empty")
    return best, witness, examined


def random_segment_profiles(count: int, seed: int,
                            sizes: Tuple[int, ...] = (3, 5, 7),
                            max_denominator: int = 24) -> Iterator[SegmentProfile]:
    """Deterministic stream of pseudo-random segment profiles.

    Coordinates are fractions with denominator at most max_denominator;
    the negative-side agents draw from [-1/2, 0], the positive side from
    [0, 1/2].  All-zero draws are rejected and redrawn.
    """
    rng = random.Random(seed)

    def draw(sign: int) -> Fraction:
        q = rng.randint(1, max_denominator)
        p = rng.randint(0, q // 2)
        return Fraction(sign * p, q)

    produced = 0
    while produced < count:
        n = sizes[produced % len(sizes)]
        k = (n - 1) // 2
        lower = sorted(draw(-1) for _ in range(k))
        upper = sorted(draw(+1) for _ in range(k))
        coords = tuple(lower) + (Fraction(0),) + tuple(upper)
        if all(c == 0 for c in coords):
            continue
        yield SegmentProfile(coords)
        produced += 1
