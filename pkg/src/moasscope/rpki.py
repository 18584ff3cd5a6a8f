"""Route origin validation against archived ROA snapshots.

Validation follows the usual ROV semantics: a route is NotFound when no
ROA covers its prefix, Valid when some covering ROA authorizes the
origin at that prefix length, and Invalid otherwise.  MOAS prefixes are
then classified by the combination of states across their origins.

ROA archives come at monthly granularity; each study day uses the
snapshot of its calendar month.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path
from typing import Iterable, Iterator

from .records import IpPrefix, prefix_mask

ROV_VALID = "Valid"
ROV_INVALID = "Invalid"
ROV_NOT_FOUND = "NotFound"

ALL_VALID = "AllValid"
AT_LEAST_ONE_VALID = "AtLeastOneValid"
ALL_INVALID = "AllInvalid"
NOT_FOUND = "NotFound"
MIXED_INVALID_NOT_FOUND = "MixedInvalidNotFound"

ROV_CLASSES = (ALL_VALID, AT_LEAST_ONE_VALID, ALL_INVALID, NOT_FOUND, MIXED_INVALID_NOT_FOUND)


@dataclass(frozen=True)
class RoaRecord:
    prefix: IpPrefix
    max_length: int
    asn: int
    snapshot_month: str = ""  # "YYYY-MM"

    def covers(self, prefix: IpPrefix) -> bool:
        return self.prefix.contains(prefix)


@dataclass
class RoaLoadStats:
    rows: int = 0
    loaded: int = 0
    duplicates: int = 0
    skipped_malformed: int = 0
    skipped_expired: int = 0


class RoaSet:
    """Containment-indexed set of ROAs for one snapshot month.

    Lookups walk the query prefix's ancestors at each prefix length
    present in the set, so a covering search costs at most one hash probe
    per distinct ROA length.
    """

    def __init__(self, roas: Iterable[RoaRecord], month: str = "", stats: RoaLoadStats | None = None):
        self.month = month
        self.stats = stats or RoaLoadStats()
        self._index: dict[tuple[int, int], dict[int, list[RoaRecord]]] = {}
        seen: set[tuple[int, int, int, int, int]] = set()
        count = 0
        for roa in roas:
            key = (roa.prefix.family, roa.prefix.address, roa.prefix.length, roa.max_length, roa.asn)
            if key in seen:
                self.stats.duplicates += 1
                continue
            seen.add(key)
            bucket = self._index.setdefault((roa.prefix.family, roa.prefix.length), {})
            bucket.setdefault(roa.prefix.address, []).append(roa)
            count += 1
        self._count = count
        self._lengths = {
            4: sorted(l for (fam, l) in self._index if fam == 4),
            6: sorted(l for (fam, l) in self._index if fam == 6),
        }

    def __len__(self) -> int:
        return self._count

    def covering(self, prefix: IpPrefix) -> list[RoaRecord]:
        """All ROAs whose prefix covers the query prefix."""
        out: list[RoaRecord] = []
        for length in self._lengths[prefix.family]:
            if length > prefix.length:
                break
            masked = prefix.address & prefix_mask(prefix.bits, length)
            out.extend(self._index[(prefix.family, length)].get(masked, ()))
        return out


def validate(prefix: IpPrefix, origin: int, roas: RoaSet) -> str:
    """ROV verdict for one prefix-origin pair."""
    covering = roas.covering(prefix)
    if not covering:
        return ROV_NOT_FOUND
    for roa in covering:
        if roa.asn == origin and prefix.length <= roa.max_length:
            return ROV_VALID
    return ROV_INVALID


def classify_moas_rov(states: Iterable[str]) -> str:
    """Aggregate per-origin ROV states of one MOAS prefix into its class.

    AtLeastOneValid excludes AllValid, so the classes partition the
    population.  {Invalid, NotFound} mixtures fall into none of the four
    usual classes and are kept distinct.
    """
    states = list(states)
    if len(states) < 2:
        raise ValueError("a MOAS prefix has at least two origins to classify")
    unknown = set(states) - {ROV_VALID, ROV_INVALID, ROV_NOT_FOUND}
    if unknown:
        raise ValueError(f"unknown ROV states: {sorted(unknown)}")
    if all(s == ROV_VALID for s in states):
        return ALL_VALID
    if any(s == ROV_VALID for s in states):
        return AT_LEAST_ONE_VALID
    if all(s == ROV_INVALID for s in states):
        return ALL_INVALID
    if all(s == ROV_NOT_FOUND for s in states):
        return NOT_FOUND
    return MIXED_INVALID_NOT_FOUND


def _parse_asn(text: str) -> int:
    text = text.strip()
    if text.upper().startswith("AS"):
        text = text[2:]
    asn = int(text)
    if not 0 <= asn <= 0xFFFFFFFF:
        raise ValueError(f"ASN out of range: {asn}")
    return asn


def _parse_when(text: str) -> date | None:
    text = text.strip()
    if not text:
        return None
    return datetime.fromisoformat(text[:10].replace("/", "-")).date()


def month_label(day: date) -> str:
    return f"{day.year:04d}-{day.month:02d}"


def _month_bounds(month: str) -> tuple[date, date]:
    year, mon = (int(p) for p in month.split("-"))
    start = date(year, mon, 1)
    end = date(year + 1, 1, 1) if mon == 12 else date(year, mon + 1, 1)
    return start, end


def iter_roa_rows(path: str | Path) -> Iterator[list[str]]:
    with open(path, "rt", encoding="utf-8", newline="") as fh:
        yield from csv.reader(fh)


def load_roas(path: str | Path, month: str) -> RoaSet:
    """Load one month's ROA CSV into a containment-indexed RoaSet.

    Expected columns: URI, ASN, IP Prefix, Max Length, Not Before, Not
    After (header optional; trailing validity columns optional).  Rows
    with max_length below the prefix length are counted and skipped, as
    are rows whose validity window does not overlap the month.
    """
    stats = RoaLoadStats()
    month_start, month_end = _month_bounds(month)
    roas: list[RoaRecord] = []
    for row in iter_roa_rows(path):
        if not row or all(not cell.strip() for cell in row):
            continue
        if row[0].strip().lower() == "uri":
            continue  # header
        stats.rows += 1
        try:
            if len(row) < 4:
                raise ValueError("short row")
            asn = _parse_asn(row[1])
            prefix = IpPrefix.parse(row[2])
            max_length = int(row[3]) if row[3].strip() else prefix.length
            if not prefix.length <= max_length <= prefix.bits:
                raise ValueError(f"max_length {max_length} outside {prefix.length}..{prefix.bits}")
            not_before = _parse_when(row[4]) if len(row) > 4 else None
            not_after = _parse_when(row[5]) if len(row) > 5 else None
        except (ValueError, IndexError):
            stats.skipped_malformed += 1
            continue
        if (not_before is not None and not_before >= month_end) or (
            not_after is not None and not_after < month_start
        ):
            stats.skipped_expired += 1
            continue
        roas.append(RoaRecord(prefix, max_length, asn, month))
        stats.loaded += 1
    return RoaSet(roas, month=month, stats=stats)
