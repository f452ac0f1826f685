"""Wire formats: exact-fraction parsing, CSV rows and the run manifest.

Decimal floats cannot represent grid coordinates such as 1/3, so every
numeric field travels as an exact fraction string ("−1/4" style) or as a
numerator/denominator column pair; decimal columns are display-only.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from typing import IO, List, Sequence

from .errors import DomainError
from .geometry import Profile
from .search import ApxRecord

CSV_HEADER = ["n", "l", "max_ratio_num", "max_ratio_den", "max_ratio_decimal",
              "witness", "classes", "restricted_flag"]


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not an exact fraction: {text!r}") from exc


def parse_rationals(text: str) -> List[Fraction]:
    """Parse a profile payload: either comma-separated fractions
    ("-1/4,0,1/4") or a JSON array of fraction strings."""
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            items = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise DomainError(f"bad JSON profile: {exc}") from exc
        if not isinstance(items, list):
            raise DomainError("JSON profile must be an array")
        return [parse_fraction(str(item)) for item in items]
    if not stripped:
        raise DomainError("empty profile")
    return [parse_fraction(part) for part in stripped.split(",")]


def format_fraction(value: Fraction) -> str:
    return str(value)


def profile_wire(profile: Profile) -> str:
    return ",".join(str(r.coord) for r in profile.reports)


def profile_json(profile: Profile) -> List[str]:
    return [str(r.coord) for r in profile.reports]


def decimal_display(value: Fraction) -> str:
    # display-only; the exact value travels in the num/den fields
    return repr(float(value))


def search_row(record: ApxRecord, restricted: bool) -> List[str]:
    return [str(record.n), str(record.l),
            str(record.max_ratio.numerator), str(record.max_ratio.denominator),
            decimal_display(record.max_ratio), profile_wire(record.witness),
            str(record.canonical_classes), "1" if restricted else "0"]


def write_search_csv(fh: IO[str], records: Sequence[ApxRecord],
                     restricted: bool) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(search_row(record, restricted))


def record_payload(record: ApxRecord) -> dict:
    return {
        "n": record.n,
        "l": record.l,
        "max_ratio": str(record.max_ratio),
        "witness": profile_json(record.witness),
        "profiles_examined": record.profiles_examined,
        "canonical_classes": record.canonical_classes,
    }


def build_manifest(command: str, config: dict, version: str,
                   elapsed_seconds: float, payload) -> dict:
    return {
        "command": command,
        "config": config,
        "tool_version": version,
        "elapsed_seconds": elapsed_seconds,
        "results": payload,
    }


def dump_manifest(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True) + "\n"
