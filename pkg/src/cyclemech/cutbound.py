"""Cut-based upper-bound machinery for the rd+pcd mixture.

The analysis proceeds in three moves, all of which are executable here:

1. *Normalization*: rotate and relabel any profile so that the point 0 is
   optimal, the reports are non-decreasing in the agent index -k..k, and
   agent 0 reports 0.  Anonymity and neutrality of the mechanisms make this
   ratio-preserving.

2. *The cut*: replace the cycle metric by the segment metric |b-a|.  This
   never decreases a distance and leaves distances to 0 unchanged, so for a
   normalized profile the quantity

       phi(b) = (sc'(rd lottery) + sc'(pcd lottery)) / (2 * sc'(0))

   (primes denoting segment-metric social costs) bounds the rd+pcd
   approximation ratio from above.  Both numerator terms collapse to closed
   forms in the sorted coordinates, implemented below and oracle-tested
   against direct computation.

3. *Reduction to the boundary*: phi extends to every non-decreasing segment
   profile with a zero middle report, and replacing any interior value by a
   neighboring image value (or +-1/2) can always be done without decreasing
   phi, because phi is a ratio of two functions linear in the moved value.
   Iterating leaves a profile supported on {-1/2, 0, 1/2}, where phi has a
   two-parameter closed form whose maximum stays below 7/4.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from .errors import DomainError
from .geometry import (HALF, CyclePoint, MetricKind, Profile, Rational,
                       RationalLike, _as_fraction, breakpoints, optimal_cost,
                       point_social_cost, wrap)

PHI_CAP = Fraction(7, 4)

Coords = Tuple[Fraction, ...]


def is_normalized(b: Profile) -> bool:
    """True iff 0 is optimal, reports are non-decreasing, and agent 0
    reports 0.  Profiles with even n are never normalized."""
    if b.n % 2 == 0:
        return False
    coords = b.coords()
    if coords[b.k] != 0:
        return False
    if any(coords[i] > coords[i + 1] for i in range(len(coords) - 1)):
        return False
    zero = CyclePoint(Fraction(0))
    opt, _ = optimal_cost(b)
    return point_social_cost(b, zero, MetricKind.CYCLE) == opt


@dataclass(frozen=True)
class NormalizedProfile:
    """A profile satisfying the three normalization conditions.

    Constructing one re-checks the conditions, so a NormalizedProfile in
    hand is always a proof that they hold.
    """

    profile: Profile

    def __post_init__(self) -> None:
        if not is_normalized(self.profile):
            raise DomainError(f"profile {self.profile!r} is not normalized")

    @property
    def coords(self) -> Coords:
        return self.profile.coords()

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def k(self) -> int:
        return self.profile.k


def normalize(b: Profile) -> NormalizedProfile:
    """Rotate an optimal point to 0 and sort the reports clockwise.

    Rotation is a neutrality move and sorting an anonymity move, so the
    rd+pcd approximation ratio of the result equals that of the input.
    When several breakpoints are optimal, the rotation producing the
    lexicographically smallest sorted profile is chosen.
    """
    if b.n % 2 == 0:
        raise DomainError(f"normalization needs odd n, got n={b.n}")
    opt, _ = optimal_cost(b)
    candidates = []
    for p in breakpoints(b):
        if point_social_cost(b, p, MetricKind.CYCLE) == opt:
            rotated = tuple(sorted(wrap(r.coord - p.coord) for r in b.reports))
            candidates.append(rotated)
    return NormalizedProfile(Profile(min(candidates)))


# --------------------------------------------------------------------------
# Closed forms for the segment-metric social costs of the two mechanisms.
# Both take the coordinates indexed by storage position p = i + k.
# --------------------------------------------------------------------------

def _cut_rd_value(coords: Coords) -> Fraction:
    # sum over agents i of 4|i|/(2k+1) * |b_i|
    n = len(coords)
    k = (n - 1) // 2
    return Fraction(4, n) * sum(
        (abs(i) * abs(coords[i + k]) for i in range(-k, k + 1)), Fraction(0))


def _cut_pcd_value(coords: Coords) -> Fraction:
    # sum_j |b_j| plus two one-sided sums whose j-th terms pair |b_j| with
    # the gap between the two reports opposite to agent j
    n = len(coords)
    k = (n - 1) // 2
    a = [abs(c) for c in coords]
    upper = sum((a[j + k] * (n - 2 * j) * (a[j - 1] - a[j])
                 for j in range(1, k + 1)), Fraction(0))
    lower = sum((a[j + k] * (n + 2 * j) * (a[j + 2 * k + 1] - a[j + 2 * k])
                 for j in range(-k, 0)), Fraction(0))
    return upper + sum(a) + lower


def sc_cut_rd(b: NormalizedProfile) -> Fraction:
    """Segment-metric social cost of the random-dictator lottery, via the
    closed form; equals social_cost(b, random_dictator(b), CUT)."""
    return _cut_rd_value(b.coords)


def sc_cut_pcd(b: NormalizedProfile) -> Fraction:
    """Segment-metric social cost of the pcd lottery, via the closed form;
    equals social_cost(b, pcd(b), CUT)."""
    return _cut_pcd_value(b.coords)


# --------------------------------------------------------------------------
# Segment profiles: the domain on which phi is defined.
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SegmentProfile:
    """A non-decreasing profile on the closed segment [-1/2, 1/2].

    Unlike cycle profiles, +1/2 and -1/2 are distinct values here.  The
    middle agent must report 0 and at least one report must be nonzero
    (phi is undefined on the all-zero profile).  Every normalized cycle
    profile other than the all-zero one embeds via its coordinates.
    """

    coords: Coords

    def __post_init__(self) -> None:
        coords = tuple(_as_fraction(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        n = len(coords)
        if n < 3 or n % 2 == 0:
            raise DomainError(f"segment profiles need odd n >= 3, got n={n}")
        if any(not -HALF <= c <= HALF for c in coords):
            raise DomainError("segment coordinates must lie in [-1/2, 1/2]")
        if any(coords[i] > coords[i + 1] for i in range(n - 1)):
            raise DomainError("segment profiles must be non-decreasing")
        if coords[(n - 1) // 2] != 0:
            raise DomainError("the middle agent must report 0")
        if all(c == 0 for c in coords):
            raise DomainError("the all-zero profile is excluded (phi undefined)")

    @classmethod
    def from_normalized(cls, b: NormalizedProfile) -> "SegmentProfile":
        return cls(b.coords)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def k(self) -> int:
        return (len(self.coords) - 1) // 2

    def image(self) -> Tuple[Fraction, ...]:
        return tuple(sorted(set(self.coords)))

    def replace_value(self, old: Fraction, new: Fraction) -> "SegmentProfile":
        """Replace every report equal to old by new."""
        return SegmentProfile(tuple(new if c == old else c for c in self.coords))


def phi(b: SegmentProfile) -> Fraction:
    """The cut-based bound: (cut rd cost + cut pcd cost) / (2 sum |b_i|)."""
    denom = 2 * sum((abs(c) for c in b.coords), Fraction(0))
    return (_cut_rd_value(b.coords) + _cut_pcd_value(b.coords)) / denom


BOUNDARY_VALUES = (-HALF, Fraction(0), HALF)


def nonboundary_count(b: SegmentProfile) -> int:
    """Number of distinct report values outside {-1/2, 0, 1/2}."""
    return len(set(b.coords) - set(BOUNDARY_VALUES))


def is_dominated(b: SegmentProfile) -> bool:
    """True iff at least k+1 agents report 0."""
    return sum(1 for c in b.coords if c == 0) >= b.k + 1


def peak_dominated_profile(n: int) -> SegmentProfile:
    """The profile (0, ..., 0, 1/2): phi attains exactly 3/2 - 1/n on it,
    which is the largest phi value any dominated profile reaches."""
    if n < 3 or n % 2 == 0:
        raise DomainError(f"need odd n >= 3, got n={n}")
    return SegmentProfile((Fraction(0),) * (n - 1) + (HALF,))


def _select_nonboundary(b: SegmentProfile) -> Fraction:
    # Deterministic choice: largest positive interior value if any,
    # otherwise the smallest negative one.
    interior = sorted(set(b.coords) - set(BOUNDARY_VALUES))
    positive = [v for v in interior if v > 0]
    return positive[-1] if positive else interior[0]


def _reduction_step(b: SegmentProfile) -> SegmentProfile:
    """One value-merging step: move all agents at one interior value to a
    neighboring image value (or the nearer boundary).

    phi as a function of the moved value is a ratio of two linear
    functions on the bracketing interval, hence monotone there, so one of
    the two endpoints cannot decrease phi.  Ties prefer the larger value.
    """
    v = _select_nonboundary(b)
    image = b.image()
    if v > 0:
        lower = max(x for x in image if x < v)
        higher = min((x for x in image if x > v), default=HALF)
    else:
        higher = min(x for x in image if x > v)
        lower = max((x for x in image if x < v), default=-HALF)
    up = b.replace_value(v, higher)
    down = b.replace_value(v, lower)
    chosen = up if phi(up) >= phi(down) else down
    if phi(chosen) < phi(b):  # pragma: no cover - contradicts monotonicity
        raise AssertionError(f"reduction step decreased phi on {b.coords}")
    return chosen


def reduction_path(b: SegmentProfile) -> List[SegmentProfile]:
    """The full reduction trajectory, starting profile included.

    Dominated profiles jump straight to (0, ..., 0, 1/2), mirroring the
    case split that guarantees phi never decreases on that move; all other
    steps merge one interior value into a neighbor.  Each step strictly
    decreases the number of interior values, so the walk terminates on a
    boundary profile.
    """
    path = [b]
    current = b
    while nonboundary_count(current) > 0:
        if is_dominated(current):
            current = peak_dominated_profile(current.n)
        else:
            current = _reduction_step(current)
        path.append(current)
    return path


def reduce_to_boundary(b: SegmentProfile) -> SegmentProfile:
    """A boundary profile (values in {-1/2, 0, 1/2}) with phi no smaller
    than phi(b); b itself if it is already boundary."""
    return reduction_path(b)[-1]


# --------------------------------------------------------------------------
# Boundary profiles in closed form.
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryParams:
    """Shape parameters of a boundary profile for a given k.

    The profile consists of k - m_minus reports at -1/2, then
    1 + m_minus + m_plus reports at 0, then k - m_plus reports at +1/2.
    Non-dominated profiles satisfy m_minus + m_plus + 1 <= k.
    """

    k: int
    m_minus: int
    m_plus: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise DomainError(f"k must be positive, got {self.k}")
        for name, m in (("m_minus", self.m_minus), ("m_plus", self.m_plus)):
            if not 0 <= m <= self.k:
                raise DomainError(f"{name}={m} outside 0..{self.k}")


def boundary_profile(p: BoundaryParams) -> SegmentProfile:
    """Expand the parameters into the explicit boundary profile."""
    if p.m_minus + p.m_plus >= 2 * p.k:
        raise DomainError("all reports would be 0; phi is undefined there")
    coords = ((-HALF,) * (p.k - p.m_minus)
              + (Fraction(0),) * (1 + p.m_minus + p.m_plus)
              + (HALF,) * (p.k - p.m_plus))
    return SegmentProfile(coords)


def phi_boundary(p: BoundaryParams) -> Fraction:
    """phi of the boundary profile, in closed form:

        (8k^2 + 8k - 2m+^2 - 2m+ - 2m-^2 - 2m- + 1)
        -------------------------------------------
              2 (2k + 1) (2k - m+ - m-)

    Equals phi(boundary_profile(p)) on the non-dominated shapes
    (m_minus + m_plus + 1 <= k); the derivation assumes both +-1/2 blocks
    are nonempty, so the two sides diverge on dominated shapes (where the
    separate 3/2 - 1/n cap applies instead).
    """
    if p.m_minus + p.m_plus >= 2 * p.k:
        raise DomainError("denominator vanishes: the profile is all-zero")
    k, mm, mp = p.k, p.m_minus, p.m_plus
    num = 8 * k * k + 8 * k - 2 * mp * mp - 2 * mp - 2 * mm * mm - 2 * mm + 1
    den = 2 * (2 * k + 1) * (2 * k - mp - mm)
    return Fraction(num, den)


def boundary_phi_max(k: int) -> Fraction:
    """Maximum of phi_boundary over all non-dominated parameter pairs.

    For a fixed total m_minus + m_plus the denominator is constant and the
    numerator is largest at the most balanced split, so scanning one
    balanced pair per total suffices.
    """
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    best: Optional[Fraction] = None
    for total in range(k):  # m_minus + m_plus + 1 <= k
        value = phi_boundary(BoundaryParams(k, total // 2, total - total // 2))
        if best is None or value > best:
            best = value
    assert best is not None
    return best


def boundary_phi_cap(k: int) -> Fraction:
    """(7k^2 + 8k + 2) / (4k^2 + 6k + 2): a closed-form cap on
    boundary_phi_max(k), itself a weighted average of 7/4, 8/6 and 2/2 and
    therefore at most 7/4.  boundary_phi_max attains it at every odd k."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    return Fraction(7 * k * k + 8 * k + 2, 4 * k * k + 6 * k + 2)
