"""Strategyproof facility location on the unit cycle, in exact arithmetic.

The package implements the random-dictator and proportional-circle-distance
mechanisms and their fair mixture, the segment-metric ("cut") machinery
that bounds the mixture's approximation ratio by 7/4, and an exhaustive
grid-search harness that verifies the bounds and the strategyproofness
claims with exact rational comparisons.
"""

from .errors import ConfigError, CycleMechError, DomainError, MechanismError
from .geometry import (HALF, CyclePoint, Lottery, MetricKind, Profile,
                       Rational, antipode, breakpoints, cut_distance,
                       cycle_distance, degenerate, distance, expected_cost,
                       optimal_cost, point_social_cost, reflect,
                       rescale_profile, shift, social_cost, wrap)
from .mechanisms import (PCD, RD, RD_PCD, ApxResult, MechanismId, Mix, apply,
                         approximation_ratio, mix, parse_mechanism, pcd,
                         random_dictator)
from .cutbound import (PHI_CAP, BoundaryParams, NormalizedProfile,
                       SegmentProfile, boundary_phi_cap, boundary_phi_max,
                       boundary_profile, is_dominated, is_normalized,
                       nonboundary_count, normalize, peak_dominated_profile,
                       phi, phi_boundary, reduce_to_boundary, reduction_path,
                       sc_cut_pcd, sc_cut_rd)
from .search import (ApxRecord, BoundReport, BoundViolation, GridSpec,
                     SearchConfig, SpViolation, antipode_dictator,
                     canonicalize, class_count_estimate, enumerate_profiles,
                     grid_points, normalized_grid_profiles, verify_bounds,
                     verify_sp, worst_case)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
