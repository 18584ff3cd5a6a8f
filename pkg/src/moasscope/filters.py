"""Route hygiene filters applied before MOAS detection.

Removes records with reserved/private origin ASNs, special-purpose or
otherwise unroutable prefixes, default routes, multicast space, and
prefixes whose source had network bits set beyond the CIDR size.

The ASN ranges and special-purpose prefix tables are loaded from dated
config snapshots (see data/), never hard-coded, since the underlying
registries change over a multi-year study window.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .records import IpPrefix, RibRecord

PASS = "Pass"
RESERVED_ASN = "ReservedAsn"
SPECIAL_PURPOSE = "SpecialPurposePrefix"
DEFAULT_ROUTE = "DefaultRoute"
HOST_BITS = "HostBitsSet"
MULTICAST = "Multicast"

DROP_KINDS = (RESERVED_ASN, SPECIAL_PURPOSE, DEFAULT_ROUTE, HOST_BITS, MULTICAST)

MULTICAST_V4 = IpPrefix.parse("224.0.0.0/4")
MULTICAST_V6 = IpPrefix.parse("ff00::/8")

DEFAULT_TABLE_RESOURCE = "bogons-20230101.conf"


@dataclass(frozen=True)
class FilterVerdict:
    kind: str
    rule_id: str = ""


_PASS_VERDICT = FilterVerdict(PASS)


class BogonTables:
    """Reserved ASN ranges plus special-purpose prefix tables.

    ASN ranges must not overlap; prefixes are matched by containment in
    file order.
    """

    def __init__(
        self,
        asn_ranges: Iterable[tuple[int, int]],
        v4_prefixes: Sequence[IpPrefix] = (),
        v6_prefixes: Sequence[IpPrefix] = (),
    ):
        ranges = sorted((int(lo), int(hi)) for lo, hi in asn_ranges)
        for (lo, hi), (nlo, _nhi) in zip(ranges, ranges[1:]):
            if lo > hi:
                raise ValueError(f"bad ASN range {lo}-{hi}")
            if nlo <= hi:
                raise ValueError(f"overlapping ASN ranges at {nlo}")
        if ranges and ranges[-1][0] > ranges[-1][1]:
            raise ValueError(f"bad ASN range {ranges[-1][0]}-{ranges[-1][1]}")
        self.asn_ranges = ranges
        self._range_los = [lo for lo, _ in ranges]
        self.v4_prefixes = tuple(v4_prefixes)
        self.v6_prefixes = tuple(v6_prefixes)

    def asn_rule(self, asn: int) -> str | None:
        """Return the matching range as 'lo-hi', or None."""
        i = bisect_right(self._range_los, asn) - 1
        if i >= 0:
            lo, hi = self.asn_ranges[i]
            if lo <= asn <= hi:
                return f"{lo}-{hi}"
        return None

    def special_rule(self, prefix: IpPrefix) -> IpPrefix | None:
        table = self.v4_prefixes if prefix.family == 4 else self.v6_prefixes
        for entry in table:
            if entry.contains(prefix):
                return entry
        return None

    @classmethod
    def load(cls, path: str | Path) -> "BogonTables":
        with open(path, "rt", encoding="utf-8") as fh:
            return cls.parse(fh)

    @classmethod
    def parse(cls, lines: Iterable[str]) -> "BogonTables":
        asn_ranges: list[tuple[int, int]] = []
        v4: list[IpPrefix] = []
        v6: list[IpPrefix] = []
        for lineno, raw in enumerate(lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                if fields[0] == "asn" and len(fields) == 3:
                    asn_ranges.append((int(fields[1]), int(fields[2])))
                elif fields[0] == "v4" and len(fields) == 2:
                    v4.append(IpPrefix.parse(fields[1]))
                elif fields[0] == "v6" and len(fields) == 2:
                    v6.append(IpPrefix.parse(fields[1]))
                else:
                    raise ValueError(f"unrecognized rule {line!r}")
            except ValueError as exc:
                raise ValueError(f"bogon table line {lineno}: {exc}") from exc
        return cls(asn_ranges, v4, v6)

    @classmethod
    def defaults(cls) -> "BogonTables":
        """The packaged registry snapshot."""
        text = resources.files("moasscope.data").joinpath(DEFAULT_TABLE_RESOURCE).read_text()
        return cls.parse(text.splitlines())


def is_reserved_asn(asn: int, tables: BogonTables) -> bool:
    return tables.asn_rule(asn) is not None


def classify_prefix(prefix: IpPrefix, tables: BogonTables) -> FilterVerdict:
    """First match wins, in fixed order, so stats stay deterministic when
    a prefix falls under several rules (0.0.0.0/0 is both a default route
    and special-purpose space)."""
    if prefix.length == 0:
        return FilterVerdict(DEFAULT_ROUTE, "default-route")
    if prefix.raw_host_bits:
        return FilterVerdict(HOST_BITS, "host-bits")
    if prefix.family == 4 and MULTICAST_V4.contains(prefix):
        return FilterVerdict(MULTICAST, "v4-multicast")
    if prefix.family == 6 and MULTICAST_V6.contains(prefix):
        return FilterVerdict(MULTICAST, "v6-multicast")
    rule = tables.special_rule(prefix)
    if rule is not None:
        return FilterVerdict(SPECIAL_PURPOSE, f"v{prefix.family}:{rule}")
    return _PASS_VERDICT


def verdict_for_record(record: RibRecord, tables: BogonTables) -> FilterVerdict:
    """The origin ASN check runs before the prefix checks."""
    rule = tables.asn_rule(record.origin_asn)
    if rule is not None:
        return FilterVerdict(RESERVED_ASN, f"asn:{rule}")
    return classify_prefix(record.prefix, tables)


@dataclass
class FilterStats:
    """Drop counts by verdict kind and by individual rule."""

    dropped: Counter
    by_rule: Counter

    @property
    def total_dropped(self) -> int:
        return sum(self.dropped.values())

    def as_dict(self) -> dict:
        return {
            "dropped": {k: self.dropped[k] for k in sorted(self.dropped)},
            "by_rule": {k: self.by_rule[k] for k in sorted(self.by_rule)},
        }


def filter_records(
    records: Iterable[RibRecord], tables: BogonTables
) -> tuple[list[RibRecord], FilterStats]:
    """Partition records into kept and per-kind drop counts."""
    kept: list[RibRecord] = []
    stats = FilterStats(Counter(), Counter())
    for record in records:
        verdict = verdict_for_record(record, tables)
        if verdict.kind == PASS:
            kept.append(record)
        else:
            stats.dropped[verdict.kind] += 1
            stats.by_rule[verdict.rule_id] += 1
    return kept, stats
