from fractions import Fraction as F
from itertools import combinations_with_replacement, permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cyclemech import (CyclePoint, Lottery, MechanismError, MetricKind, Mix,
                       PCD, Profile, RD, RD_PCD, apply, approximation_ratio,
                       mix, parse_mechanism, pcd, random_dictator, reflect,
                       shift, social_cost)
from cyclemech.search import GridSpec, grid_points

HALF = F(1, 2)


def pt(x) -> CyclePoint:
    return CyclePoint(F(x))


def small_grid_profiles(n, l):
    return (Profile(c) for c in
            combinations_with_replacement(grid_points(GridSpec(l)), n))


# ---------------------------------------------------------------------- rd

def test_rd_examples():
    assert random_dictator(Profile([F(-1, 4), 0, F(1, 4)])) == Lottery(
        {pt(F(-1, 4)): F(1, 3), pt(0): F(1, 3), pt(F(1, 4)): F(1, 3)})
    assert random_dictator(Profile([0, 0, HALF])) == Lottery(
        {pt(0): F(2, 3), pt(-HALF): F(1, 3)})
    assert random_dictator(Profile([F(1, 5)] * 3)) == Lottery({pt(F(1, 5)): 1})


def test_rd_accepts_any_population():
    assert random_dictator(Profile([0])) == Lottery({pt(0): 1})
    assert random_dictator(Profile([0, F(1, 4)])) == Lottery(
        {pt(0): HALF, pt(F(1, 4)): HALF})


# --------------------------------------------------------------------- pcd

def test_pcd_examples():
    assert pcd(Profile([F(-1, 4), 0, F(1, 4)])) == Lottery(
        {pt(F(-1, 4)): F(1, 4), pt(0): HALF, pt(F(1, 4)): F(1, 4)})
    # the two agents at 0 oppose the two half arcs; the third agent opposes
    # the empty arc between the coincident reports
    assert pcd(Profile([0, 0, HALF])) == Lottery({pt(0): 1})
    assert pcd(Profile([F(1, 5)] * 3)) == Lottery({pt(F(1, 5)): 1})


def test_pcd_rejects_even_or_tiny_populations():
    with pytest.raises(MechanismError):
        pcd(Profile([0, F(1, 4)]))
    with pytest.raises(MechanismError):
        pcd(Profile([0]))


def test_pcd_probabilities_tile_the_cycle():
    # Lottery construction would fail if the arc lengths did not sum to 1.
    for profile in small_grid_profiles(5, 5):
        lottery = pcd(profile)
        assert sum(pr for _, pr in lottery.entries) == 1


def test_pcd_tie_breaking_is_immaterial():
    for profile in small_grid_profiles(5, 4):
        expected = pcd(profile)
        for perm in set(permutations(profile.reports)):
            assert pcd(Profile(perm)) == expected


# --------------------------------------------------------------------- mix

def test_mix_examples():
    l0 = Lottery({pt(0): 1})
    assert mix(l0, l0) == l0
    assert mix(l0, Lottery({pt(-HALF): 1})) == Lottery(
        {pt(0): HALF, pt(-HALF): HALF})
    a = Lottery({pt(0): F(2, 3), pt(F(1, 4)): F(1, 3)})
    b = Lottery({pt(0): F(1, 3), pt(F(1, 4)): F(2, 3)})
    assert mix(a, b) == Lottery({pt(0): HALF, pt(F(1, 4)): HALF})


def test_apply_examples():
    p3 = Profile([F(-1, 4), 0, F(1, 4)])
    assert apply(RD, p3) == random_dictator(p3)
    assert apply(RD_PCD, p3) == Lottery(
        {pt(F(-1, 4)): F(7, 24), pt(0): F(5, 12), pt(F(1, 4)): F(7, 24)})
    unanimous = Profile([F(1, 3)] * 3)
    assert apply(RD_PCD, unanimous) == Lottery({pt(F(1, 3)): 1})


def test_apply_rejects_unknown_mechanism():
    with pytest.raises(MechanismError):
        apply("median", Profile([0]))


def test_parse_mechanism():
    assert parse_mechanism("rd") == RD
    assert parse_mechanism("PCD") == PCD
    assert parse_mechanism("rd+pcd") == RD_PCD
    with pytest.raises(MechanismError):
        parse_mechanism("rd+")
    with pytest.raises(MechanismError):
        parse_mechanism("qcd")


# ------------------------------------------------------------------- ratios

def test_ratio_examples():
    rd_tight = approximation_ratio(RD, Profile([0, 0, HALF]))
    assert rd_tight.ratio == F(4, 3)  # the 2 - 2/n bound, tight at n = 3
    assert (rd_tight.mechanism_sc, rd_tight.opt) == (F(2, 3), HALF)

    unanimous = approximation_ratio(RD_PCD, Profile([F(1, 7)] * 3))
    assert unanimous.ratio == 1
    assert unanimous.mechanism_sc == 0

    mixed = approximation_ratio(RD_PCD, Profile([F(-1, 4), 0, F(1, 4)]))
    assert mixed.ratio == F(31, 24)
    assert mixed.mechanism_sc == F(31, 48)
    assert mixed.opt == HALF


@pytest.mark.parametrize("n, l", [(3, 4), (3, 5), (5, 4)])
def test_ratio_bounds_on_grids(n, l):
    for profile in small_grid_profiles(n, l):
        assert approximation_ratio(RD, profile).ratio <= 2 - F(2, n)
        assert approximation_ratio(PCD, profile).ratio <= 2
        assert approximation_ratio(RD_PCD, profile).ratio >= 1


@pytest.mark.parametrize("n, l", [(3, 4), (5, 3)])
def test_mixture_ratio_is_mean_of_ratios(n, l):
    for profile in small_grid_profiles(n, l):
        mixed = approximation_ratio(RD_PCD, profile).ratio
        parts = (approximation_ratio(RD, profile).ratio
                 + approximation_ratio(PCD, profile).ratio)
        assert mixed == parts / 2


# --------------------------------------------------------------- symmetries

@pytest.mark.parametrize("mechanism", [RD, PCD, RD_PCD])
def test_peaks_only(mechanism):
    for profile in small_grid_profiles(3, 5):
        support = apply(mechanism, profile).support
        assert set(support) <= set(profile.reports)


@pytest.mark.parametrize("mechanism", [RD, PCD, RD_PCD])
def test_anonymity(mechanism):
    for profile in small_grid_profiles(3, 4):
        expected = apply(mechanism, profile)
        for perm in permutations(profile.reports):
            assert apply(mechanism, Profile(perm)) == expected


@pytest.mark.parametrize("mechanism", [RD, PCD, RD_PCD])
def test_neutrality_under_rotation_and_reflection(mechanism):
    l = 6
    for profile in small_grid_profiles(3, l):
        base = apply(mechanism, profile)
        for j in range(l):
            delta = F(j, l)
            rotated = apply(mechanism,
                            Profile(shift(r, delta) for r in profile.reports))
            assert rotated == Lottery(
                {shift(p, delta): pr for p, pr in base.entries})
        reflected = apply(mechanism,
                          Profile(reflect(r) for r in profile.reports))
        assert reflected == Lottery(
            {reflect(p): pr for p, pr in base.entries})


@given(st.lists(st.fractions(min_value=-HALF, max_value=HALF,
                             max_denominator=24), min_size=3, max_size=3))
def test_mixture_never_worse_than_average_on_random_profiles(raw):
    profile = Profile(raw)
    mixed_sc = social_cost(profile, apply(RD_PCD, profile), MetricKind.CYCLE)
    rd_sc = social_cost(profile, apply(RD, profile), MetricKind.CYCLE)
    pcd_sc = social_cost(profile, apply(PCD, profile), MetricKind.CYCLE)
    assert mixed_sc == (rd_sc + pcd_sc) / 2
