"""Core data types shared across the pipeline: prefixes, AS paths, RIB rows."""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta, timezone

V4_BITS = 32
V6_BITS = 128

SEQUENCE = "seq"
SET = "set"
CONFED = "confed"


def prefix_mask(bits: int, length: int) -> int:
    """Network mask of ``length`` leading bits within a ``bits``-wide address."""
    if length == 0:
        return 0
    return ((1 << length) - 1) << (bits - length)


@dataclass(frozen=True, order=True)
class IpPrefix:
    """A versioned address block in canonical (masked) form.

    ``address`` always has every bit beyond ``length`` cleared.
    ``raw_host_bits`` records whether the source had such bits set; it is
    provenance only and excluded from equality/ordering, so prefixes group
    by their canonical identity.
    """

    family: int  # 4 or 6
    address: int  # network address as an unsigned integer, masked to length
    length: int
    raw_host_bits: bool = field(default=False, compare=False)

    @property
    def bits(self) -> int:
        return V4_BITS if self.family == 4 else V6_BITS

    @classmethod
    def from_int(cls, family: int, address: int, length: int) -> IpPrefix:
        bits = V4_BITS if family == 4 else V6_BITS
        if family not in (4, 6):
            raise ValueError(f"bad address family: {family}")
        if not 0 <= length <= bits:
            raise ValueError(f"prefix length {length} out of range for IPv{family}")
        masked = address & prefix_mask(bits, length)
        return cls(family, masked, length, raw_host_bits=(masked != address))

    @classmethod
    def parse(cls, text: str) -> IpPrefix:
        addr_s, sep, len_s = text.strip().partition("/")
        if not sep:
            raise ValueError(f"not a prefix: {text!r}")
        addr = ipaddress.ip_address(addr_s)
        return cls.from_int(addr.version, int(addr), int(len_s))

    def __str__(self) -> str:
        if self.family == 4:
            addr = ipaddress.IPv4Address(self.address)
        else:
            addr = ipaddress.IPv6Address(self.address)
        return f"{addr}/{self.length}"

    def contains(self, other: IpPrefix) -> bool:
        """True when this block covers ``other`` (equal or less specific)."""
        return (
            self.family == other.family
            and self.length <= other.length
            and (other.address & prefix_mask(self.bits, self.length)) == self.address
        )


@dataclass(frozen=True)
class AsPath:
    """BGP AS path as a tuple of segments.

    Each segment is ``(kind, asns)`` with kind one of ``seq`` (ordered
    sequence), ``set`` (unordered aggregate set) or ``confed`` (legacy
    confederation segment).  The origin is defined only when the final
    segment is a sequence.
    """

    segments: tuple[tuple[str, tuple[int, ...]], ...]

    @classmethod
    def from_hops(cls, hops) -> AsPath:
        """Build from the wire-friendly hop list: ints, with nested lists as AS sets."""
        segs: list[tuple[str, tuple[int, ...]]] = []
        run: list[int] = []
        for hop in hops:
            if isinstance(hop, bool):
                raise ValueError(f"bad AS path hop: {hop!r}")
            if isinstance(hop, int):
                run.append(hop)
            elif isinstance(hop, (list, tuple)):
                if run:
                    segs.append((SEQUENCE, tuple(run)))
                    run = []
                asns = []
                for a in hop:
                    if isinstance(a, bool) or not isinstance(a, int):
                        raise ValueError(f"bad AS set member: {a!r}")
                    asns.append(a)
                segs.append((SET, tuple(asns)))
            else:
                raise ValueError(f"bad AS path hop: {hop!r}")
        if run:
            segs.append((SEQUENCE, tuple(run)))
        return cls(tuple(segs))

    def to_hops(self) -> list:
        hops: list = []
        for kind, asns in self.segments:
            if kind == SEQUENCE:
                hops.extend(asns)
            else:
                hops.append(list(asns))
        return hops

    def origin(self) -> int | None:
        """Origin AS: last AS of the final sequence segment, else undefined."""
        if not self.segments:
            return None
        kind, asns = self.segments[-1]
        if kind != SEQUENCE or not asns:
            return None
        return asns[-1]

    def ends_in_set(self) -> bool:
        return bool(self.segments) and self.segments[-1][0] == SET


@dataclass(frozen=True)
class RibRecord:
    """One (prefix, peer) row taken from a RIB snapshot."""

    snapshot_ts: datetime
    collector: str
    peer_asn: int
    peer_ip: str
    prefix: IpPrefix
    as_path: AsPath
    origin_asn: int

    @property
    def peer_identity(self) -> tuple[str, str, int]:
        """A route collector peer is one BGP session: (collector, ip, asn)."""
        return (self.collector, self.peer_ip, self.peer_asn)


@dataclass(frozen=True, order=True)
class SnapshotKey:
    """One nominal dump time: a calendar day plus an intra-day slot index."""

    day: date
    slot: int

    @property
    def label(self) -> str:
        return f"{self.day.isoformat()}.s{self.slot}"

    @classmethod
    def from_label(cls, label: str) -> SnapshotKey:
        day_s, _, slot_s = label.rpartition(".s")
        return cls(date.fromisoformat(day_s), int(slot_s))


def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime."""
    ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_rfc3339(ts: datetime) -> str:
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc)
    return ts.strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_hhmm(text: str) -> time:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"bad nominal time: {text!r}")
    return time(*(int(p) for p in parts))


@dataclass(frozen=True)
class AlignmentConfig:
    """Maps raw dump timestamps onto nominal per-day snapshot slots.

    Collector dumps start with some jitter around the nominal time, so a
    timestamp is accepted into the nearest slot within ``tolerance`` and
    rejected otherwise.
    """

    nominal_times: tuple[time, ...] = (time(8, 0),)
    tolerance: timedelta = timedelta(minutes=30)

    @property
    def slots_per_day(self) -> int:
        return len(self.nominal_times)

    def nominal_datetime(self, key: SnapshotKey) -> datetime:
        return datetime.combine(key.day, self.nominal_times[key.slot], tzinfo=timezone.utc)

    def align(self, ts: datetime) -> SnapshotKey | None:
        """Return the nearest in-tolerance slot, or None when rejected."""
        if ts.tzinfo is None:
            ts = ts.replace(tzinfo=timezone.utc)
        best: tuple[timedelta, datetime, SnapshotKey] | None = None
        for day_off in (-1, 0, 1):
            day = ts.date() + timedelta(days=day_off)
            for slot, nominal in enumerate(self.nominal_times):
                nominal_dt = datetime.combine(day, nominal, tzinfo=timezone.utc)
                dist = abs(ts - nominal_dt)
                if dist > self.tolerance:
                    continue
                cand = (dist, nominal_dt, SnapshotKey(day, slot))
                if best is None or cand[:2] < best[:2]:
                    best = cand
        return best[2] if best else None


def align_snapshot(file_ts: datetime, config: AlignmentConfig) -> SnapshotKey | None:
    """Assign a dump timestamp to a snapshot slot; None means rejected."""
    return config.align(file_ts)
