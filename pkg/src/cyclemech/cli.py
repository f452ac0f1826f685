"""Command-line interface.

Subcommands: eval (run a mechanism on one profile), search (worst-case
ratio sweep over grids, CSV + manifest output), verify (exhaustive
invariant suites with exit-code contract), phi (cut-bound values).

Exit codes: 0 success / no violations, 1 violations found, 2 bad
configuration or input.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from fractions import Fraction
from typing import List, Optional

# Lets option values such as "-1/4,0,1/4" parse without requiring the
# --option=value form: anything starting with a minus and a digit is a
# value, not a flag (no option here begins with a digit).
_FRACTION_VALUE = re.compile(r"^-\d[\d/.,-]*$")

from . import __version__
from .cutbound import (BoundaryParams, SegmentProfile, boundary_phi_cap,
                       boundary_phi_max, nonboundary_count, phi, phi_boundary,
                       reduction_path, sc_cut_pcd, sc_cut_rd, normalize,
                       PHI_CAP)
from .errors import ConfigError, CycleMechError, DomainError
from .geometry import (MetricKind, Profile, degenerate, rescale_profile,
                       social_cost)
from .mechanisms import (PCD, RD, RD_PCD, apply, mix, parse_mechanism, pcd,
                         random_dictator)
from .oracles import (optimal_cost_scan, random_segment_profiles,
                      worst_case_raw)
from .search import (GridSpec, MechanismLike, SearchConfig, antipode_dictator,
                     normalized_grid_profiles, verify_bounds, verify_sp,
                     worst_case)
from .wire import (build_manifest, dump_manifest, parse_fraction,
                   parse_rationals, profile_wire, record_payload,
                   write_search_csv)
from .geometry import optimal_cost

BROKEN_MECHANISM = "antipode-dictator"
THREE_HALVES = Fraction(3, 2)
REDUCTION_SAMPLES = 500
REDUCTION_SEED = 20240 + 7


def _resolve_mechanism(text: str) -> MechanismLike:
    if text.strip().lower() == BROKEN_MECHANISM:
        return antipode_dictator
    return parse_mechanism(text)


def _mechanism_name(mechanism: MechanismLike) -> str:
    return BROKEN_MECHANISM if callable(mechanism) else str(mechanism)


def _print_lottery(lottery) -> None:
    print("lottery:")
    for pt, pr in lottery.entries:
        print(f"  {pt}  {pr}")


def cmd_eval(args: argparse.Namespace) -> int:
    raw = parse_rationals(args.profile)
    if args.cycle_length is not None:
        profile = rescale_profile(raw, parse_fraction(args.cycle_length))
        print(f"rescaled profile: {profile_wire(profile)}")
    else:
        profile = Profile(raw)
    mechanism = _resolve_mechanism(args.mechanism)
    lottery = (mechanism(profile) if callable(mechanism)
               else apply(mechanism, profile))
    cost = social_cost(profile, lottery, MetricKind.CYCLE)
    opt, opt_point = optimal_cost(profile)
    print(f"profile: {profile_wire(profile)}")
    print(f"mechanism: {_mechanism_name(mechanism)}")
    _print_lottery(lottery)
    print(f"social cost: {cost}")
    print(f"optimal cost: {opt} at {opt_point}")
    if opt == 0 and cost != 0:
        raise DomainError("optimum is 0 but the mechanism pays a positive "
                          "cost; the ratio is unbounded")
    ratio = Fraction(1) if opt == 0 else cost / opt
    print(f"ratio: {ratio}")
    if args.oracle:
        scan_opt, scan_pt = optimal_cost_scan(profile, refine=2)
        if scan_opt != opt:
            print(f"oracle MISMATCH: dense scan found {scan_opt} at {scan_pt}")
            return 1
        print("oracle: dense-grid scan confirms the optimum")
    return 0


def _parse_l_range(text: str) -> range:
    parts = text.split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise ConfigError(f"bad grid range {text!r}; use L or LMIN..LMAX")
    if lo > hi:
        raise ConfigError(f"empty grid range {text!r}")
    return range(lo, hi + 1)


def cmd_search(args: argparse.Namespace) -> int:
    mechanism = _resolve_mechanism(args.mechanism)
    l_range = _parse_l_range(args.l)
    started = time.monotonic()
    records = []
    for l in l_range:
        config = SearchConfig(n=args.n, grid=GridSpec(l), mechanism=mechanism,
                              max_distinct=args.max_distinct,
                              worker_count=args.workers, budget=args.budget)
        records.append(worst_case(config))
    elapsed = time.monotonic() - started

    restricted = args.max_distinct is not None
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_search_csv(fh, records, restricted)
        manifest_path = args.manifest or args.out + ".manifest.json"
        manifest = build_manifest(
            command="search",
            config={"n": args.n, "l_min": l_range.start,
                    "l_max": l_range.stop - 1,
                    "mechanism": _mechanism_name(mechanism),
                    "max_distinct": args.max_distinct,
                    "workers": args.workers},
            version=__version__, elapsed_seconds=elapsed,
            payload=[record_payload(r) for r in records])
        with open(manifest_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(dump_manifest(manifest))
        print(f"wrote {args.out} and {manifest_path}")
    else:
        write_search_csv(sys.stdout, records, restricted)

    top = max(records, key=lambda r: r.max_ratio)
    print(f"searched n={args.n}, l={l_range.start}..{l_range.stop - 1}, "
          f"mechanism {_mechanism_name(mechanism)}"
          + (f", max_distinct={args.max_distinct}" if restricted else ""))
    print(f"overall max ratio: {top.max_ratio} (~{float(top.max_ratio):.6f}) "
          f"at l={top.l}, witness {profile_wire(top.witness)}")
    print("strictly below 3/2: "
          + ("yes" if top.max_ratio < THREE_HALVES else "NO"))

    if args.oracle:
        for record, l in zip(records, l_range):
            config = SearchConfig(n=args.n, grid=GridSpec(l),
                                  mechanism=mechanism,
                                  max_distinct=args.max_distinct,
                                  budget=args.budget)
            raw_max, raw_witness, examined = worst_case_raw(config)
            if raw_max != record.max_ratio:
                print(f"oracle MISMATCH at l={l}: raw enumeration over "
                      f"{examined} profiles found {raw_max} "
                      f"(witness {profile_wire(raw_witness)})")
                return 1
            print(f"oracle: l={l} raw enumeration over {examined} profiles "
                  f"agrees ({raw_max})")
    return 0


CHECK_NAMES = ("sp", "bounds", "closed-forms", "reduction")


def _check_sp(config_base: dict, mechanisms) -> int:
    failures = 0
    for mechanism in mechanisms:
        config = SearchConfig(mechanism=mechanism, **config_base)
        violations = verify_sp(config)
        print(f"check sp ({_mechanism_name(mechanism)}): "
              f"{len(violations)} violation(s)")
        for v in violations[:20]:
            print(f"  profile {profile_wire(v.profile)} agent {v.agent} -> "
                  f"{v.deviation}: cost {v.truthful_cost} -> {v.deviated_cost}")
        if len(violations) > 20:
            print(f"  ... {len(violations) - 20} more")
        failures += len(violations)
    return failures


def _check_bounds(config_base: dict) -> int:
    config = SearchConfig(**config_base)
    report = verify_bounds(config)
    print(f"check bounds: {len(report.violations)} violation(s) across "
          f"{report.classes_checked} classes")
    for v in report.violations[:20]:
        print(f"  profile {profile_wire(v.profile)}: ratio {v.ratio}, "
              f"phi {v.phi_value} ({v.detail})")
    return len(report.violations)


def _check_closed_forms(n: int, grid: GridSpec) -> int:
    failures = 0
    checked = 0
    zero = degenerate(0)
    for profile in normalized_grid_profiles(n, grid):
        checked += 1
        normalized = normalize(profile)
        lot_rd, lot_pcd = random_dictator(profile), pcd(profile)
        pairs = ((sc_cut_rd(normalized), lot_rd, "rd"),
                 (sc_cut_pcd(normalized), lot_pcd, "pcd"))
        for closed, lottery, name in pairs:
            direct = social_cost(profile, lottery, MetricKind.CUT)
            if closed != direct:
                failures += 1
                print(f"  closed-form mismatch ({name}) on "
                      f"{profile_wire(profile)}: {closed} vs {direct}")
        for lottery in (lot_rd, lot_pcd, mix(lot_rd, lot_pcd)):
            cut = social_cost(profile, lottery, MetricKind.CUT)
            cyc = social_cost(profile, lottery, MetricKind.CYCLE)
            if cut < cyc:
                failures += 1
                print(f"  cut inequality fails on {profile_wire(profile)}")
        if (social_cost(profile, zero, MetricKind.CUT)
                != social_cost(profile, zero, MetricKind.CYCLE)):
            failures += 1
            print(f"  cost at 0 not preserved on {profile_wire(profile)}")
    print(f"check closed-forms: {failures} violation(s) across "
          f"{checked} normalized profiles")
    return failures


def _check_reduction(n: int, grid: GridSpec) -> int:
    failures = 0
    walked = 0

    def audit(segment: SegmentProfile) -> None:
        nonlocal failures, walked
        walked += 1
        path = reduction_path(segment)
        values = [phi(step) for step in path]
        widths = [nonboundary_count(step) for step in path]
        ok = (widths[-1] == 0
              and all(a <= b for a, b in zip(values, values[1:]))
              and all(a > b for a, b in zip(widths, widths[1:]))
              and values[-1] <= PHI_CAP)
        if not ok:
            failures += 1
            print(f"  reduction failure from {segment.coords}")

    for profile in normalized_grid_profiles(n, grid):
        normalized = normalize(profile)
        if all(c == 0 for c in normalized.coords):
            continue
        audit(SegmentProfile.from_normalized(normalized))
    for segment in random_segment_profiles(REDUCTION_SAMPLES, REDUCTION_SEED):
        audit(segment)
    print(f"check reduction: {failures} violation(s) across {walked} walks")
    return failures


def cmd_verify(args: argparse.Namespace) -> int:
    checks = ([c.strip() for c in args.checks.split(",")] if args.checks
              else list(CHECK_NAMES))
    unknown = [c for c in checks if c not in CHECK_NAMES]
    if unknown:
        raise ConfigError(f"unknown checks: {', '.join(unknown)}; "
                          f"choose from {', '.join(CHECK_NAMES)}")
    grid = GridSpec(args.l)
    config_base = dict(n=args.n, grid=grid, worker_count=args.workers,
                       budget=args.budget)
    mechanisms = ([_resolve_mechanism(args.mechanism)] if args.mechanism
                  else [RD, PCD, RD_PCD])
    failures = 0
    for check in checks:
        if check == "sp":
            failures += _check_sp(config_base, mechanisms)
        elif check == "bounds":
            failures += _check_bounds(config_base)
        elif check == "closed-forms":
            failures += _check_closed_forms(args.n, grid)
        elif check == "reduction":
            failures += _check_reduction(args.n, grid)
    print(f"result: {'PASS' if failures == 0 else f'FAIL ({failures})'}")
    return 0 if failures == 0 else 1


def cmd_phi(args: argparse.Namespace) -> int:
    if args.profile is not None:
        segment = SegmentProfile(tuple(parse_rationals(args.profile)))
        print(phi(segment))
    elif args.boundary is not None:
        fields = args.boundary.split(",")
        if len(fields) != 3:
            raise ConfigError("--boundary expects K,M_PLUS,M_MINUS")
        try:
            k, m_plus, m_minus = (int(f) for f in fields)
        except ValueError:
            raise ConfigError(f"bad --boundary value {args.boundary!r}")
        print(phi_boundary(BoundaryParams(k=k, m_minus=m_minus, m_plus=m_plus)))
    else:
        print(f"{'k':>4}  {'boundary_max':>14}  {'cap':>14}  "
              f"{'boundary_max~':>12}  {'cap~':>12}")
        for k in range(1, args.kmax + 1):
            top, cap = boundary_phi_max(k), boundary_phi_cap(k)
            print(f"{k:>4}  {str(top):>14}  {str(cap):>14}  "
                  f"{float(top):>12.8f}  {float(cap):>12.8f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclemech",
        description="Strategyproof facility location on the unit cycle: "
                    "exact mechanism evaluation, worst-case search and "
                    "invariant verification.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="run a mechanism on one profile")
    p_eval._negative_number_matcher = _FRACTION_VALUE
    p_eval.add_argument("--profile", required=True,
                        help="comma-separated exact fractions, or a JSON "
                             "array of fraction strings")
    p_eval.add_argument("--mechanism", default="rd+pcd",
                        help="rd, pcd, or a '+'-joined mixture (default rd+pcd)")
    p_eval.add_argument("--cycle-length", default=None,
                        help="treat the profile as raw coordinates in "
                             "[0, Z) on a cycle of circumference Z and "
                             "rescale to the unit cycle")
    p_eval.add_argument("--oracle", action="store_true",
                        help=argparse.SUPPRESS)
    p_eval.set_defaults(func=cmd_eval)

    p_search = sub.add_parser("search",
                              help="worst-case ratio sweep over grids")
    p_search.add_argument("--n", type=int, required=True,
                          help="odd number of agents")
    p_search.add_argument("--l", required=True,
                          help="grid size or range, e.g. 6 or 2..12")
    p_search.add_argument("--mechanism", default="rd+pcd")
    p_search.add_argument("--max-distinct", dest="max_distinct", type=int,
                          default=None,
                          help="restrict to profiles with at most this many "
                               "distinct reported points")
    p_search.add_argument("--workers", type=int, default=1)
    p_search.add_argument("--budget", type=int, default=None,
                          help="enumeration budget override")
    p_search.add_argument("--out", default=None, help="CSV output path")
    p_search.add_argument("--manifest", default=None,
                          help="manifest path (default: OUT.manifest.json)")
    p_search.add_argument("--oracle", action="store_true",
                          help=argparse.SUPPRESS)
    p_search.set_defaults(func=cmd_search)

    p_verify = sub.add_parser("verify", help="run exhaustive invariant checks")
    p_verify.add_argument("--n", type=int, required=True)
    p_verify.add_argument("--l", type=int, required=True)
    p_verify.add_argument("--checks", default=None,
                          help="comma-separated subset of: "
                               + ", ".join(CHECK_NAMES) + " (default: all)")
    p_verify.add_argument("--mechanism", default=None,
                          help="restrict the sp check to one mechanism")
    p_verify.add_argument("--workers", type=int, default=1)
    p_verify.add_argument("--budget", type=int, default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_phi = sub.add_parser("phi", help="cut-bound values")
    p_phi._negative_number_matcher = _FRACTION_VALUE
    group = p_phi.add_mutually_exclusive_group(required=True)
    group.add_argument("--profile", default=None,
                       help="segment profile (non-decreasing, middle 0)")
    group.add_argument("--boundary", default=None, help="K,M_PLUS,M_MINUS")
    group.add_argument("--kmax", type=int, default=None,
                       help="print the boundary maximum table for k=1..KMAX")
    p_phi.set_defaults(func=cmd_phi)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CycleMechError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
