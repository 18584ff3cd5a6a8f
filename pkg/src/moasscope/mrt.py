"""Binary MRT (RFC 6396) decoding for TABLE_DUMP_V2 RIB snapshots.

Only the record types needed for RIB analysis are understood:
PEER_INDEX_TABLE (13/1), RIB_IPV4_UNICAST (13/2) and RIB_IPV6_UNICAST
(13/4).  AS numbers inside TABLE_DUMP_V2 RIB entries are always 4 bytes
wide, so no AS4_PATH merging is needed.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from ipaddress import IPv4Address, IPv6Address
from typing import BinaryIO, Iterator

MRT_HEADER = struct.Struct(">IHHI")

TABLE_DUMP_V2 = 13
PEER_INDEX_TABLE = 1
RIB_IPV4_UNICAST = 2
RIB_IPV6_UNICAST = 4

ATTR_AS_PATH = 2
ATTR_FLAG_EXT_LEN = 0x10

_SEGMENT_KINDS = {1: "set", 2: "seq", 3: "confed", 4: "confed"}


class MrtDecodeError(Exception):
    """Fatal decode failure. ``offset`` is the file offset of the failing record."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class MrtEntryError(ValueError):
    """A single RIB entry could not be decoded; callers count and skip."""


@dataclass(frozen=True)
class MrtPeer:
    bgp_id: int
    ip: str
    asn: int


@dataclass(frozen=True)
class RibEntry:
    peer_index: int
    # None when the entry carried no AS_PATH attribute.
    path_segments: tuple[tuple[str, tuple[int, ...]], ...] | None


@dataclass(frozen=True)
class RibPrefixRecord:
    ts: int
    family: int
    prefix_int: int  # as encoded, before masking
    prefix_len: int
    entries: tuple[RibEntry, ...]
    entries_malformed: int


def iter_records(stream: BinaryIO) -> Iterator[tuple[int, int, int, int, bytes]]:
    """Yield (offset, ts, type, subtype, body) for each MRT record.

    Truncated headers or bodies raise :class:`MrtDecodeError` carrying the
    offset at which the bad record starts.
    """
    offset = 0
    while True:
        header = stream.read(MRT_HEADER.size)
        if not header:
            return
        if len(header) < MRT_HEADER.size:
            raise MrtDecodeError(
                f"truncated MRT header: expected {MRT_HEADER.size} bytes, got {len(header)}",
                offset,
            )
        ts, mrt_type, subtype, length = MRT_HEADER.unpack(header)
        body = stream.read(length)
        if len(body) < length:
            raise MrtDecodeError(
                f"truncated MRT record body: expected {length} bytes, got {len(body)}",
                offset,
            )
        yield offset, ts, mrt_type, subtype, body
        offset += MRT_HEADER.size + length


def parse_peer_index(body: bytes, offset: int = 0) -> list[MrtPeer]:
    """Decode the PEER_INDEX_TABLE body into the ordered peer list."""
    try:
        _collector_id, view_len = struct.unpack_from(">IH", body, 0)
        pos = 6 + view_len
        (count,) = struct.unpack_from(">H", body, pos)
        pos += 2
        peers: list[MrtPeer] = []
        for _ in range(count):
            peer_type = body[pos]
            pos += 1
            (bgp_id,) = struct.unpack_from(">I", body, pos)
            pos += 4
            if peer_type & 0x01:
                ip = str(IPv6Address(body[pos : pos + 16]))
                pos += 16
            else:
                ip = str(IPv4Address(body[pos : pos + 4]))
                pos += 4
            if peer_type & 0x02:
                (asn,) = struct.unpack_from(">I", body, pos)
                pos += 4
            else:
                (asn,) = struct.unpack_from(">H", body, pos)
                pos += 2
            peers.append(MrtPeer(bgp_id, ip, asn))
        return peers
    except (struct.error, IndexError, ValueError) as exc:
        raise MrtDecodeError(f"unreadable PEER_INDEX_TABLE: {exc}", offset) from exc


def _parse_as_path(data: bytes) -> tuple[tuple[str, tuple[int, ...]], ...]:
    segments: list[tuple[str, tuple[int, ...]]] = []
    pos = 0
    while pos < len(data):
        if pos + 2 > len(data):
            raise MrtEntryError("truncated AS_PATH segment header")
        seg_type = data[pos]
        count = data[pos + 1]
        pos += 2
        kind = _SEGMENT_KINDS.get(seg_type)
        if kind is None:
            raise MrtEntryError(f"unknown AS_PATH segment type {seg_type}")
        need = 4 * count
        if pos + need > len(data):
            raise MrtEntryError("truncated AS_PATH segment body")
        asns = struct.unpack_from(f">{count}I", data, pos) if count else ()
        pos += need
        segments.append((kind, tuple(asns)))
    return tuple(segments)


def _find_as_path(attr_data: bytes):
    """Walk the BGP attribute block and return the AS_PATH segments, if any."""
    pos = 0
    path = None
    while pos < len(attr_data):
        if pos + 3 > len(attr_data):
            raise MrtEntryError("truncated BGP attribute header")
        flags = attr_data[pos]
        attr_type = attr_data[pos + 1]
        if flags & ATTR_FLAG_EXT_LEN:
            if pos + 4 > len(attr_data):
                raise MrtEntryError("truncated BGP attribute header")
            (alen,) = struct.unpack_from(">H", attr_data, pos + 2)
            hdr = 4
        else:
            alen = attr_data[pos + 2]
            hdr = 3
        body = attr_data[pos + hdr : pos + hdr + alen]
        if len(body) < alen:
            raise MrtEntryError("truncated BGP attribute body")
        if attr_type == ATTR_AS_PATH:
            path = _parse_as_path(body)
        pos += hdr + alen
    return path


def parse_rib_unicast(ts: int, subtype: int, body: bytes, offset: int = 0) -> RibPrefixRecord:
    """Decode a RIB_IPV4_UNICAST / RIB_IPV6_UNICAST body.

    Entries that cannot be decoded are dropped and counted in
    ``entries_malformed``; a bad entry boundary makes the remainder of the
    record unrecoverable, so all remaining entries count as malformed.
    """
    family = 4 if subtype == RIB_IPV4_UNICAST else 6
    addr_bytes = 4 if family == 4 else 16
    try:
        _seq, prefix_len = struct.unpack_from(">IB", body, 0)
        octets = (prefix_len + 7) // 8
        if prefix_len > addr_bytes * 8 or 5 + octets + 2 > len(body):
            raise MrtEntryError("bad prefix encoding")
        prefix_int = int.from_bytes(
            body[5 : 5 + octets] + b"\x00" * (addr_bytes - octets), "big"
        )
        pos = 5 + octets
        (entry_count,) = struct.unpack_from(">H", body, pos)
        pos += 2
    except (struct.error, MrtEntryError) as exc:
        raise MrtDecodeError(f"unreadable RIB record: {exc}", offset) from exc

    entries: list[RibEntry] = []
    malformed = 0
    for _ in range(entry_count):
        try:
            peer_index, _orig_ts, attr_len = struct.unpack_from(">HIH", body, pos)
            attr_data = body[pos + 8 : pos + 8 + attr_len]
            if len(attr_data) < attr_len:
                raise MrtEntryError("truncated RIB entry attributes")
            entries.append(RibEntry(peer_index, _find_as_path(attr_data)))
            pos += 8 + attr_len
        except (struct.error, MrtEntryError):
            # Entry boundaries are derived from attr_len, so a bad entry
            # poisons everything after it within this record.
            malformed += entry_count - len(entries)
            break
    return RibPrefixRecord(ts, family, prefix_int, prefix_len, tuple(entries), malformed)
