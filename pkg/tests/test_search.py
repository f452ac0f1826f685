import json
import math
from fractions import Fraction as F
from itertools import permutations, product

import pytest

from cyclemech import (ConfigError, CyclePoint, DomainError, GridSpec,
                       Profile, RD, RD_PCD, antipode_dictator,
                       approximation_ratio, canonicalize,
                       class_count_estimate, enumerate_profiles, grid_points,
                       verify_bounds, verify_sp, worst_case, wrap)
from cyclemech.search import SearchConfig

HALF = F(1, 2)


def pt(x) -> CyclePoint:
    return CyclePoint(F(x))


def config(n, l, **kw) -> SearchConfig:
    return SearchConfig(n=n, grid=GridSpec(l), **kw)


# ----------------------------------------------------- brute-force reference

def brute_orbit(coords, l):
    """All raw ordered tuples reachable by rotation/reflection/permutation,
    computed from first principles (no package symmetry code)."""
    out = set()
    for a in range(l):
        for sign in (1, -1):
            moved = [wrap(sign * c + F(a, l)).coord for c in coords]
            out.update(permutations(moved))
    return out


def brute_canonical(coords, l):
    return min(tuple(sorted(t)) for t in brute_orbit(coords, l))


# ----------------------------------------------------------------------- grid

def test_grid_points_examples():
    assert [p.coord for p in grid_points(GridSpec(2))] == [-HALF, 0]
    assert [p.coord for p in grid_points(GridSpec(4))] == [
        -HALF, F(-1, 4), 0, F(1, 4)]
    assert [p.coord for p in grid_points(GridSpec(3))] == [F(-1, 3), 0, F(1, 3)]


def test_grid_properties():
    for l in range(2, 12):
        pts = grid_points(GridSpec(l))
        assert len(pts) == l
        assert pt(0) in pts
        gaps = {pts[i + 1].coord - pts[i].coord for i in range(l - 1)}
        assert gaps == {F(1, l)}


def test_grid_too_small():
    with pytest.raises(ConfigError):
        GridSpec(1)


# ------------------------------------------------------------ canonicalization

def test_canonicalize_merges_rotated_profiles():
    g = GridSpec(4)
    a = canonicalize(Profile([0, F(1, 4), 0]), g)
    b = canonicalize(Profile([F(-1, 4), 0, 0]), g)
    assert a == b


def test_canonicalize_frozen_example():
    # brute-force orbit minimum of (-1/4, 0, 1/4) on the l=4 grid
    assert canonicalize(Profile([F(-1, 4), 0, F(1, 4)]), GridSpec(4)) == \
        Profile([-HALF, F(-1, 4), 0])


def test_canonicalize_rejects_off_grid_reports():
    with pytest.raises(DomainError):
        canonicalize(Profile([F(1, 3)]), GridSpec(4))


@pytest.mark.parametrize("n, l", [(3, 3), (3, 4), (2, 5), (4, 3)])
def test_canonicalize_matches_brute_force(n, l):
    g = GridSpec(l)
    pts = grid_points(g)
    for combo in product(pts, repeat=n):
        profile = Profile(combo)
        expected = brute_canonical(profile.coords(), l)
        assert canonicalize(profile, g).coords() == expected


def test_canonical_forms_partition_raw_profiles():
    n, l = 3, 4
    g = GridSpec(l)
    by_class = {}
    for combo in product(grid_points(g), repeat=n):
        profile = Profile(combo)
        by_class.setdefault(canonicalize(profile, g), set()).add(profile)
    # classes partition all l^n raw profiles and equal the enumeration
    assert sum(len(v) for v in by_class.values()) == l ** n
    reps = list(enumerate_profiles(config(n, l)))
    assert sorted(by_class) == sorted(reps, key=lambda p: p.coords())
    # profiles in one class are exactly the symmetry orbits
    for rep, members in by_class.items():
        assert {m.coords() for m in members} == brute_orbit(rep.coords(), l)


# ------------------------------------------------------------------ enumerate

def test_enumerate_class_counts():
    assert len(list(enumerate_profiles(config(3, 2)))) == 2
    assert len(list(enumerate_profiles(config(3, 2, max_distinct=1)))) == 1


def test_enumerate_yields_canonical_sorted_profiles():
    for profile in enumerate_profiles(config(3, 6)):
        coords = profile.coords()
        assert coords == tuple(sorted(coords))
        assert canonicalize(profile, GridSpec(6)) == profile


def test_class_count_estimate_bounds_reality():
    cfg = config(5, 4)
    estimate = class_count_estimate(cfg)
    assert estimate == math.comb(4 + 5 - 1, 5)
    assert len(list(enumerate_profiles(cfg))) <= estimate
    restricted = config(5, 4, max_distinct=2)
    assert class_count_estimate(restricted) == math.comb(4, 1) + \
        math.comb(4, 2) * math.comb(4, 1)


def test_budget_guardrail():
    with pytest.raises(ConfigError, match="max_distinct"):
        list(enumerate_profiles(config(3, 4, budget=3)))
    # restriction lowers the estimate below the budget
    assert list(enumerate_profiles(config(3, 4, budget=5, max_distinct=1)))


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("CYCLEMECH_ENUM_BUDGET", "2")
    with pytest.raises(ConfigError):
        list(enumerate_profiles(config(3, 4)))
    monkeypatch.setenv("CYCLEMECH_ENUM_BUDGET", "1000000")
    assert list(enumerate_profiles(config(3, 4)))


def test_search_config_validation():
    with pytest.raises(ConfigError):
        SearchConfig(n=4, grid=GridSpec(4))
    with pytest.raises(ConfigError):
        SearchConfig(n=3, grid=GridSpec(4), max_distinct=0)
    with pytest.raises(ConfigError):
        SearchConfig(n=3, grid=GridSpec(4), worker_count=0)


# ----------------------------------------------------------------- worst case

def test_worst_case_tiny_grid():
    record = worst_case(config(3, 2))
    assert record.max_ratio == F(7, 6)
    assert record.witness == Profile([-HALF, -HALF, 0])
    assert record.canonical_classes == 2
    assert record.profiles_examined == 2 ** 3


def test_worst_case_frozen_values():
    assert worst_case(config(3, 4)).max_ratio == F(31, 24)
    assert worst_case(config(3, 4)).witness == Profile([-HALF, F(-1, 4), 0])
    assert worst_case(config(3, 4, mechanism=RD)).max_ratio == F(4, 3)


def test_worst_case_examined_covers_every_raw_profile():
    for n, l in [(3, 4), (5, 3)]:
        assert worst_case(config(n, l)).profiles_examined == l ** n


def test_worst_case_witness_reproduces_ratio():
    record = worst_case(config(5, 4))
    assert approximation_ratio(RD_PCD, record.witness).ratio == record.max_ratio


def test_worst_case_deterministic_across_workers():
    records = [worst_case(config(3, 6, worker_count=w)) for w in (1, 2, 8)]
    assert records[0] == records[1] == records[2]


def test_restricted_search_matches_full_search_n5():
    # exhaustively confirmed: <=3 distinct points attain the worst case
    for l in (4, 5):
        full = worst_case(config(5, l))
        restricted = worst_case(config(5, l, max_distinct=3))
        assert restricted.max_ratio == full.max_ratio


def test_grid_refinement_never_loses_profiles():
    assert worst_case(config(3, 4)).max_ratio <= worst_case(config(3, 8)).max_ratio
    assert worst_case(config(3, 2)).max_ratio <= worst_case(config(3, 4)).max_ratio


def test_symmetry_soundness_ratio_constant_on_orbits():
    g = GridSpec(4)
    for rep in enumerate_profiles(config(3, 4)):
        expected = approximation_ratio(RD_PCD, rep).ratio
        for member in brute_orbit(rep.coords(), 4):
            assert approximation_ratio(RD_PCD, Profile(member)).ratio == expected


# ------------------------------------------------------------------------- sp

@pytest.mark.parametrize("mechanism", [RD, "pcd", RD_PCD])
def test_verify_sp_clean_for_real_mechanisms(mechanism):
    assert verify_sp(config(3, 4, mechanism=mechanism)) == []


def test_verify_sp_flags_broken_mechanism():
    violations = verify_sp(config(3, 4, mechanism=antipode_dictator))
    assert violations
    for v in violations:
        assert v.deviated_cost < v.truthful_cost
        assert v.deviation != v.profile.agent(v.agent)


def test_verify_sp_parallel_matches_sequential():
    cfg = dict(n=3, l=5, mechanism=antipode_dictator)
    assert verify_sp(config(**cfg)) == verify_sp(config(**cfg, worker_count=2))


# ---------------------------------------------------------------------- bounds

def test_verify_bounds_clean():
    report = verify_bounds(config(3, 6))
    assert report.ok
    assert report.classes_checked == len(list(enumerate_profiles(config(3, 6))))


def test_verify_bounds_clean_n5():
    assert verify_bounds(config(5, 4, worker_count=2)).ok
