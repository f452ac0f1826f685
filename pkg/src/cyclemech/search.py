"""Exhaustive verification over grids of equally spaced cycle points.

Profiles on the grid are grouped into equivalence classes under agent
permutations, the l grid rotations, and the reflection through 0; the
mechanisms are anonymous and neutral, so every quantity of interest is
constant on each class.  A class is represented by the lexicographically
smallest sorted profile in its orbit, and enumeration yields exactly one
representative per class.

Internally profiles are handled as sorted tuples of *ranks* (positions in
the coordinate-sorted grid), so canonicalization is pure small-integer
work; coordinates enter only when a mechanism is evaluated.  The heavy
searches split the class list into one contiguous chunk per worker and
reduce with an associative, commutative rule (max ratio, ties to the
lexicographically smallest witness), so results do not depend on the
worker count.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

from .cutbound import (PHI_CAP, SegmentProfile, is_normalized, normalize, phi)
from .errors import ConfigError, DomainError
from .geometry import (CyclePoint, Lottery, MetricKind, Profile, Rational,
                       antipode, degenerate, expected_cost, optimal_cost,
                       social_cost, wrap)
from .mechanisms import MechanismId, RD_PCD, apply

BUDGET_ENV = "CYCLEMECH_ENUM_BUDGET"
DEFAULT_BUDGET = 10_000_000

MechanismLike = Union[MechanismId, Callable[[Profile], Lottery]]


@dataclass(frozen=True)
class GridSpec:
    """l equally spaced grid points including 0 (consecutive gaps 1/l)."""

    l: int

    def __post_init__(self) -> None:
        if self.l < 2:
            raise ConfigError(f"grid needs at least 2 points, got l={self.l}")


def grid_points(g: GridSpec) -> Tuple[CyclePoint, ...]:
    """The grid points in ascending coordinate order."""
    return _tables(g.l).points


@dataclass(frozen=True)
class SearchConfig:
    n: int
    grid: GridSpec
    mechanism: MechanismLike = RD_PCD
    max_distinct: Optional[int] = None
    worker_count: int = 1
    budget: Optional[int] = None  # None: environment override or default

    def __post_init__(self) -> None:
        if self.n < 3 or self.n % 2 == 0:
            raise ConfigError(f"searches need odd n >= 3, got n={self.n}")
        if self.max_distinct is not None and self.max_distinct < 1:
            raise ConfigError(f"max_distinct must be >= 1, got {self.max_distinct}")
        if self.worker_count < 1:
            raise ConfigError(f"worker_count must be >= 1, got {self.worker_count}")

    def effective_budget(self) -> int:
        if self.budget is not None:
            return self.budget
        return int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET))


@dataclass(frozen=True)
class ApxRecord:
    """Worst case of a ratio search over one (n, grid) configuration."""

    n: int
    l: int
    max_ratio: Rational
    witness: Profile
    profiles_examined: int
    canonical_classes: int


@dataclass(frozen=True)
class SpViolation:
    """A strictly profitable misreport found by the detector."""

    profile: Profile
    agent: int
    deviation: CyclePoint
    truthful_cost: Rational
    deviated_cost: Rational


@dataclass(frozen=True)
class BoundViolation:
    profile: Profile
    ratio: Rational
    phi_value: Optional[Rational]
    detail: str


@dataclass(frozen=True)
class BoundReport:
    classes_checked: int
    violations: Tuple[BoundViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


# --------------------------------------------------------------------------
# Rank-space symmetry machinery.
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _GridTables:
    points: Tuple[CyclePoint, ...]            # coordinate-sorted grid
    transforms: Tuple[Tuple[int, ...], ...]   # rank -> rank, one per symmetry


@lru_cache(maxsize=None)
def _tables(l: int) -> _GridTables:
    by_index = [wrap(Fraction(j, l)) for j in range(l)]
    idx_of_rank = sorted(range(l), key=lambda j: by_index[j])
    rank_of_idx = [0] * l
    for r, j in enumerate(idx_of_rank):
        rank_of_idx[j] = r
    transforms = []
    for a in range(l):
        for sign in (1, -1):
            transforms.append(tuple(
                rank_of_idx[(sign * idx_of_rank[r] + a) % l] for r in range(l)))
    points = tuple(by_index[j] for j in idx_of_rank)
    return _GridTables(points, tuple(transforms))


def _rank_tuple(b: Profile, g: GridSpec) -> Tuple[int, ...]:
    tables = _tables(g.l)
    rank_by_point = {pt: r for r, pt in enumerate(tables.points)}
    try:
        ranks = sorted(rank_by_point[r] for r in b.reports)
    except KeyError as exc:
        raise DomainError(f"report {exc.args[0]} is not on the grid l={g.l}") from None
    return tuple(ranks)


def _canonical_key(ranks: Tuple[int, ...], l: int) -> Tuple[int, ...]:
    return min(tuple(sorted(t[r] for r in ranks)) for t in _tables(l).transforms)


def _is_canonical(ranks: Tuple[int, ...], l: int) -> bool:
    for t in _tables(l).transforms:
        if tuple(sorted(t[r] for r in ranks)) < ranks:
            return False
    return True


def _profile_of_ranks(ranks: Sequence[int], l: int) -> Profile:
    points = _tables(l).points
    return Profile(points[r] for r in ranks)


def _orbit_raw_count(ranks: Tuple[int, ...], l: int) -> int:
    """Number of raw ordered grid profiles in the class of `ranks`."""
    images = {tuple(sorted(t[r] for r in ranks)) for t in _tables(l).transforms}
    orderings = math.factorial(len(ranks))
    for c in Counter(ranks).values():
        orderings //= math.factorial(c)
    return len(images) * orderings


def canonicalize(b: Profile, g: GridSpec) -> Profile:
    """Lexicographically smallest profile in b's symmetry orbit.

    Two grid profiles canonicalize identically iff one is an image of the
    other under some combination of agent permutation, grid rotation and
    reflection.
    """
    return _profile_of_ranks(_canonical_key(_rank_tuple(b, g), g.l), g.l)


def class_count_estimate(c: SearchConfig) -> int:
    """Upper bound on the number of classes: sorted grid tuples compatible
    with the max_distinct restriction (symmetry reduction only shrinks it)."""
    l, n = c.grid.l, c.n
    if c.max_distinct is None:
        return math.comb(l + n - 1, n)
    top = min(c.max_distinct, l, n)
    return sum(math.comb(l, d) * math.comb(n - 1, d - 1) for d in range(1, top + 1))


def _check_budget(c: SearchConfig) -> None:
    estimate = class_count_estimate(c)
    budget = c.effective_budget()
    if estimate > budget:
        hint = ("; restrict the search with max_distinct"
                if c.max_distinct is None else "")
        raise ConfigError(
            f"enumeration estimate {estimate} exceeds budget {budget}{hint}"
            f" (override via {BUDGET_ENV} or SearchConfig.budget)")


def _canonical_rank_tuples(c: SearchConfig) -> Iterator[Tuple[int, ...]]:
    l = c.grid.l
    for ranks in combinations_with_replacement(range(l), c.n):
        if c.max_distinct is not None and len(set(ranks)) > c.max_distinct:
            continue
        if _is_canonical(ranks, l):
            yield ranks


def enumerate_profiles(c: SearchConfig) -> Iterator[Profile]:
    """One representative per canonical class, in lexicographic order."""
    _check_budget(c)
    for ranks in _canonical_rank_tuples(c):
        yield _profile_of_ranks(ranks, c.grid.l)


# --------------------------------------------------------------------------
# Deterministic chunked map-reduce.
# --------------------------------------------------------------------------

def _split(items: List, parts: int) -> List[List]:
    parts = max(1, min(parts, len(items)) if items else 1)
    size = math.ceil(len(items) / parts) if items else 0
    return [items[i:i + size] for i in range(0, len(items), size)] or [[]]


def _map_chunks(worker: Callable, payloads: List, processes: int) -> List:
    if processes <= 1 or len(payloads) <= 1:
        return [worker(p) for p in payloads]
    import multiprocessing as mp

    ctx = mp.get_context("spawn")
    with ctx.Pool(processes) as pool:
        return pool.map(worker, payloads)


def _outcome(mechanism: MechanismLike, b: Profile) -> Lottery:
    return mechanism(b) if callable(mechanism) else apply(mechanism, b)


def _ratio_of(mechanism: MechanismLike, b: Profile) -> Fraction:
    opt, _ = optimal_cost(b)
    cost = social_cost(b, _outcome(mechanism, b), MetricKind.CYCLE)
    if opt == 0:
        if cost != 0:
            raise DomainError(
                "mechanism pays a positive cost at a zero optimum; "
                "its approximation ratio is unbounded")
        return Fraction(1)
    return cost / opt


def _worst_chunk(args) -> Tuple[Optional[Fraction], Optional[Tuple[Fraction, ...]], int, int]:
    l, mechanism, chunk = args
    best: Optional[Fraction] = None
    witness: Optional[Tuple[Fraction, ...]] = None
    raw = 0
    for ranks in chunk:
        profile = _profile_of_ranks(ranks, l)
        ratio = _ratio_of(mechanism, profile)
        raw += _orbit_raw_count(ranks, l)
        coords = profile.coords()
        if best is None or ratio > best or (ratio == best and coords < witness):
            best, witness = ratio, coords
    return best, witness, raw, len(chunk)


def worst_case(c: SearchConfig) -> ApxRecord:
    """Maximum approximation ratio over all canonical classes.

    The result (ratio and witness) is identical for every worker_count:
    chunks are contiguous slices of the deterministic class stream and the
    reduction is order-independent.
    """
    _check_budget(c)
    reps = list(_canonical_rank_tuples(c))
    chunks = _split(reps, c.worker_count)
    results = _map_chunks(_worst_chunk,
                          [(c.grid.l, c.mechanism, chunk) for chunk in chunks],
                          c.worker_count)
    best: Optional[Fraction] = None
    witness: Optional[Tuple[Fraction, ...]] = None
    raw_total = 0
    classes = 0
    for ratio, coords, raw, count in results:
        raw_total += raw
        classes += count
        if ratio is None:
            continue
        if best is None or ratio > best or (ratio == best and coords < witness):
            best, witness = ratio, coords
    if best is None:
        raise ConfigError("search space is empty")
    return ApxRecord(n=c.n, l=c.grid.l, max_ratio=best,
                     witness=Profile(witness), profiles_examined=raw_total,
                     canonical_classes=classes)


# --------------------------------------------------------------------------
# Strategyproofness detector.
# --------------------------------------------------------------------------

def antipode_dictator(b: Profile) -> Lottery:
    """Deliberately broken reference mechanism: always selects the antipode
    of the middle agent's report.  Any deviation by that agent strictly
    lowers their cost, so a working detector must flag it."""
    return degenerate(antipode(b.agent(0)))


def _sp_chunk(args) -> List[SpViolation]:
    l, mechanism, chunk = args
    points = _tables(l).points
    out: List[SpViolation] = []
    for ranks in chunk:
        profile = _profile_of_ranks(ranks, l)
        k = profile.k
        truthful = _outcome(mechanism, profile)
        for pos, report in enumerate(profile.reports):
            t_cost = expected_cost(report, truthful, MetricKind.CYCLE)
            for v in points:
                if v == report:
                    continue
                deviated = _outcome(mechanism, profile.replace(pos, v))
                d_cost = expected_cost(report, deviated, MetricKind.CYCLE)
                if d_cost < t_cost:
                    out.append(SpViolation(profile, pos - k, v, t_cost, d_cost))
    return out


def verify_sp(c: SearchConfig) -> List[SpViolation]:
    """Check every canonical profile, agent and grid deviation for a
    strictly profitable misreport under the cycle metric.

    Symmetry makes class representatives sufficient: violations transform
    covariantly under the group.  Deviations are restricted to grid
    points, which samples the continuum soundly.
    """
    _check_budget(c)
    reps = list(_canonical_rank_tuples(c))
    chunks = _split(reps, c.worker_count)
    results = _map_chunks(_sp_chunk,
                          [(c.grid.l, c.mechanism, chunk) for chunk in chunks],
                          c.worker_count)
    return [v for chunk in results for v in chunk]


# --------------------------------------------------------------------------
# Bound-chain verification: ratio <= phi(normalized) <= 7/4.
# --------------------------------------------------------------------------

def _bounds_chunk(args) -> Tuple[int, List[BoundViolation]]:
    l, chunk = args
    out: List[BoundViolation] = []
    for ranks in chunk:
        profile = _profile_of_ranks(ranks, l)
        ratio = _ratio_of(RD_PCD, profile)
        normalized = normalize(profile)
        if all(coord == 0 for coord in normalized.coords):
            if ratio != 1:
                out.append(BoundViolation(profile, ratio, None,
                                          "unanimous profile with ratio != 1"))
            continue
        value = phi(SegmentProfile.from_normalized(normalized))
        if ratio > value:
            out.append(BoundViolation(profile, ratio, value, "ratio > phi"))
        if value > PHI_CAP:
            out.append(BoundViolation(profile, ratio, value, "phi > 7/4"))
    return len(chunk), out


def verify_bounds(c: SearchConfig) -> BoundReport:
    """Certify, class by class, that the rd+pcd ratio is bounded by phi of
    the normalized profile and that phi stays at or below 7/4."""
    _check_budget(c)
    reps = list(_canonical_rank_tuples(c))
    chunks = _split(reps, c.worker_count)
    results = _map_chunks(_bounds_chunk,
                          [(c.grid.l, chunk) for chunk in chunks],
                          c.worker_count)
    checked = sum(count for count, _ in results)
    violations = tuple(v for _, vs in results for v in vs)
    return BoundReport(classes_checked=checked, violations=violations)


def normalized_grid_profiles(n: int, g: GridSpec) -> Iterator[Profile]:
    """All normalized profiles with reports on the grid (not reduced by
    symmetry; normalization already fixes rotation and agent order)."""
    points = _tables(g.l).points
    for combo in combinations_with_replacement(points, n):
        profile = Profile(combo)
        if is_normalized(profile):
            yield profile
