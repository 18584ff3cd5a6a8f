"""Shared test helpers: hand-encoded MRT fixtures and timeline builders.

The MRT builders encode records field by field per the RFC 6396 wire
layout, independently of the decoder under test, so fixture bytes serve
as a reference for the parser.
"""

from __future__ import annotations

import ipaddress
import struct
from datetime import date, timedelta

from moasscope.moas import MoasObservation, MoasTimeline
from moasscope.records import IpPrefix, SnapshotKey

TABLE_DUMP_V2 = 13
PEER_INDEX_TABLE = 1
RIB_IPV4_UNICAST = 2
RIB_IPV6_UNICAST = 4

FIXTURE_TS = 1655107200  # 2022-06-13T08:00:00Z


def mrt_record(mtype: int, subtype: int, body: bytes, ts: int = FIXTURE_TS) -> bytes:
    return struct.pack(">IHHI", ts, mtype, subtype, len(body)) + body


def peer_index_body(
    peers: list[tuple[str, int]],
    collector_id: int = 0x0A000001,
    view_name: bytes = b"",
) -> bytes:
    body = struct.pack(">IH", collector_id, len(view_name)) + view_name
    body += struct.pack(">H", len(peers))
    for i, (ip, asn) in enumerate(peers):
        addr = ipaddress.ip_address(ip)
        peer_type = 0x02  # 4-byte AS number
        if addr.version == 6:
            peer_type |= 0x01
        body += struct.pack(">B", peer_type)
        body += struct.pack(">I", 0xC0000200 + i)  # peer BGP id
        body += addr.packed
        body += struct.pack(">I", asn)
    return body


def as_path_attr(segments: list[tuple[str, list[int]]], extended: bool = False) -> bytes:
    data = b""
    for kind, asns in segments:
        code = 2 if kind == "seq" else 1
        data += struct.pack(">BB", code, len(asns))
        data += b"".join(struct.pack(">I", a) for a in asns)
    flags = 0x40  # transitive
    if extended or len(data) > 255:
        flags |= 0x10
        return struct.pack(">BBH", flags, 2, len(data)) + data
    return struct.pack(">BBB", flags, 2, len(data)) + data


def origin_attr() -> bytes:
    # ORIGIN (type 1), value IGP; padding attribute for walk coverage
    return struct.pack(">BBB", 0x40, 1, 1) + b"\x00"


def rib_entry(peer_index: int, attrs: bytes, originated: int = FIXTURE_TS) -> bytes:
    return struct.pack(">HIH", peer_index, originated, len(attrs)) + attrs


def rib_unicast_body(prefix: str, entries: list[bytes], seq: int = 0) -> bytes:
    addr_s, _, len_s = prefix.partition("/")
    addr = ipaddress.ip_address(addr_s)
    plen = int(len_s)
    octets = (plen + 7) // 8
    body = struct.pack(">IB", seq, plen) + addr.packed[:octets]
    body += struct.pack(">H", len(entries)) + b"".join(entries)
    return body


def simple_rib_file(
    peers: list[tuple[str, int]],
    rib_records: list[tuple[str, list[tuple[int, list[tuple[str, list[int]]]]]]],
) -> bytes:
    """PEER_INDEX_TABLE followed by RIB records.

    rib_records: list of (prefix, entries) with entries as
    (peer_index, path_segments).
    """
    blob = mrt_record(TABLE_DUMP_V2, PEER_INDEX_TABLE, peer_index_body(peers))
    for seq, (prefix, entries) in enumerate(rib_records):
        subtype = RIB_IPV6_UNICAST if ":" in prefix else RIB_IPV4_UNICAST
        encoded = [
            rib_entry(peer_index, origin_attr() + as_path_attr(segments))
            for peer_index, segments in entries
        ]
        blob += mrt_record(TABLE_DUMP_V2, subtype, rib_unicast_body(prefix, encoded, seq))
    return blob


DAY_ONE = date(2022, 6, 1)


def day_date(day: int, start: date = DAY_ONE) -> date:
    return start + timedelta(days=day - 1)


def make_timeline(
    days,
    prefix: str = "151.80.0.0/22",
    origins: tuple[int, ...] = (3333, 12859),
    start: date = DAY_ONE,
    window_days: int = 400,
) -> MoasTimeline:
    """Timeline with MOAS observations on the given 1-based day numbers."""
    p = IpPrefix.parse(prefix)
    visibility = {asn: 5 * (i + 1) for i, asn in enumerate(sorted(origins))}
    window = (start, start + timedelta(days=window_days - 1))
    obs = {
        day_date(d, start): MoasObservation(
            p, SnapshotKey(day_date(d, start), 0), tuple(sorted(origins)), dict(visibility)
        )
        for d in days
    }
    return MoasTimeline(p, window, obs)
