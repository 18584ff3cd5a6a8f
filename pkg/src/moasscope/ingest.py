"""Decode RIB snapshots into canonical RibRecord streams.

Two source formats are supported: binary MRT TABLE_DUMP_V2 files
(optionally gzip/bzip2 compressed, sniffed by magic bytes) and a
normalized JSONL interchange format with one route per line:

    {"ts": "2023-01-01T08:00:00Z", "collector": "rrc00",
     "peer_ip": "192.0.2.1", "peer_asn": 65010,
     "prefix": "193.0.0.0/21", "path": [65010, 3333]}

A nested array inside ``path`` denotes an AS set.  Unknown fields are
ignored, with one extension: a ``raw_host_bits`` boolean marks routes
whose source prefix had bits set beyond the CIDR size, so that a
converted file round-trips exactly.

Routes whose path ends in an AS set carry no single origin and are
dropped with a counter rather than guessing.  One input file is expected
to hold one snapshot; rows that align to a different slot than the
file's first row are counted as malformed and skipped.
"""

from __future__ import annotations

import bz2
import gzip
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

from . import mrt
from .records import (
    AlignmentConfig,
    AsPath,
    IpPrefix,
    RibRecord,
    SnapshotKey,
    format_rfc3339,
    parse_rfc3339,
)

GZIP_MAGIC = b"\x1f\x8b"
BZ2_MAGIC = b"BZh"

MAX_RECORDED_ERRORS = 200
MALFORMED_FATAL_FRACTION = 0.10


class IngestError(Exception):
    """Fatal input problem (unreadable file, malformed beyond tolerance)."""


@dataclass
class IngestStats:
    """Per-file accounting. Always: total == emitted + as_set_origins + malformed."""

    source: str = ""
    total: int = 0
    emitted: int = 0
    as_set_origins: int = 0
    malformed: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)

    def record_error(self, where: int, message: str) -> None:
        self.malformed += 1
        if len(self.errors) < MAX_RECORDED_ERRORS:
            self.errors.append((where, message))

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "total": self.total,
            "emitted": self.emitted,
            "as_set_origins": self.as_set_origins,
            "malformed": self.malformed,
        }


def open_rib_stream(source: str | Path | BinaryIO) -> BinaryIO:
    """Open a possibly gzip/bzip2 compressed byte stream, sniffing magic bytes."""
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            magic = fh.read(3)
        if magic.startswith(GZIP_MAGIC):
            return gzip.open(source, "rb")
        if magic.startswith(BZ2_MAGIC):
            return bz2.open(source, "rb")
        return open(source, "rb")
    stream = source
    if hasattr(stream, "peek"):
        magic = stream.peek(3)[:3]
    elif stream.seekable():
        magic = stream.read(3)
        stream.seek(-len(magic), io.SEEK_CUR)
    else:
        return stream  # no way to sniff; assume raw MRT
    if magic.startswith(GZIP_MAGIC):
        return gzip.GzipFile(fileobj=stream)
    if magic.startswith(BZ2_MAGIC):
        return bz2.BZ2File(stream)
    return stream


def _record_from_path(
    snapshot_ts: datetime,
    collector: str,
    peer_asn: int,
    peer_ip: str,
    prefix: IpPrefix,
    path: AsPath,
) -> RibRecord | None:
    """None means the path has no usable single origin (trailing AS set)."""
    origin = path.origin()
    if origin is None:
        return None
    return RibRecord(snapshot_ts, collector, peer_asn, peer_ip, prefix, path, origin)


def parse_mrt_rib(
    source: str | Path | BinaryIO,
    collector: str,
    align: AlignmentConfig | None = None,
) -> tuple[list[RibRecord], IngestStats]:
    """Decode an MRT TABLE_DUMP_V2 RIB file into RibRecords.

    Every (prefix, peer) RIB entry becomes one record.  A missing
    PEER_INDEX_TABLE before the first RIB entry, or a truncated file, is
    fatal and raises :class:`mrt.MrtDecodeError` with the byte offset.
    When ``align`` is given, records are stamped with the nominal slot
    time of the file's snapshot instead of the raw dump timestamp.
    """
    stats = IngestStats(source=str(source) if isinstance(source, (str, Path)) else "<stream>")
    records: list[RibRecord] = []
    peers: list[mrt.MrtPeer] | None = None
    snapshot_ts: datetime | None = None

    stream = open_rib_stream(source)
    try:
        for offset, ts, mrt_type, subtype, body in mrt.iter_records(stream):
            if mrt_type != mrt.TABLE_DUMP_V2:
                continue
            if subtype == mrt.PEER_INDEX_TABLE:
                peers = mrt.parse_peer_index(body, offset)
                continue
            if subtype not in (mrt.RIB_IPV4_UNICAST, mrt.RIB_IPV6_UNICAST):
                continue
            if peers is None:
                raise mrt.MrtDecodeError("RIB entry before PEER_INDEX_TABLE", offset)
            if snapshot_ts is None:
                raw_ts = datetime.fromtimestamp(ts, tz=timezone.utc)
                if align is not None:
                    key = align.align(raw_ts)
                    if key is None:
                        raise IngestError(
                            f"{stats.source}: dump timestamp {raw_ts} aligns to no snapshot slot"
                        )
                    snapshot_ts = align.nominal_datetime(key)
                else:
                    snapshot_ts = raw_ts
            rib = mrt.parse_rib_unicast(ts, subtype, body, offset)
            stats.total += len(rib.entries) + rib.entries_malformed
            stats.malformed += rib.entries_malformed
            try:
                prefix = IpPrefix.from_int(rib.family, rib.prefix_int, rib.prefix_len)
            except ValueError as exc:
                stats.malformed += len(rib.entries)
                if len(stats.errors) < MAX_RECORDED_ERRORS:
                    stats.errors.append((offset, str(exc)))
                continue
            for entry in rib.entries:
                if entry.path_segments is None:
                    stats.record_error(offset, "RIB entry without AS_PATH attribute")
                    continue
                if entry.peer_index >= len(peers):
                    stats.record_error(offset, f"unknown peer index {entry.peer_index}")
                    continue
                peer = peers[entry.peer_index]
                path = AsPath(entry.path_segments)
                record = _record_from_path(
                    snapshot_ts, collector, peer.asn, peer.ip, prefix, path
                )
                if record is None:
                    if path.ends_in_set():
                        stats.as_set_origins += 1
                    else:
                        stats.record_error(offset, "AS path with no usable origin")
                    continue
                records.append(record)
                stats.emitted += 1
    finally:
        if stream is not source:
            stream.close()
    return records, stats


def _iter_lines(source: str | Path | Iterable[str]) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, "rt", encoding="utf-8") as fh:
            yield from fh
    else:
        yield from source


def parse_normalized(
    lines: str | Path | Iterable[str],
    collector: str | None = None,
    align: AlignmentConfig | None = None,
) -> tuple[list[RibRecord], IngestStats]:
    """Parse the normalized JSONL format.

    ``collector`` is the fallback when lines carry no collector field.
    Malformed lines are counted and skipped with their line number; more
    than 10% malformed lines is fatal.
    """
    stats = IngestStats(source=str(lines) if isinstance(lines, (str, Path)) else "<lines>")
    records: list[RibRecord] = []
    file_key: SnapshotKey | None = None

    for lineno, line in enumerate(_iter_lines(lines), start=1):
        text = line.strip()
        if not text:
            continue
        stats.total += 1
        try:
            obj = json.loads(text)
            if not isinstance(obj, dict):
                raise ValueError("line is not a JSON object")
            ts = parse_rfc3339(str(obj["ts"]))
            coll = obj.get("collector", collector)
            if not coll:
                raise ValueError("missing collector")
            peer_asn = int(obj["peer_asn"])
            peer_ip = str(obj["peer_ip"])
            prefix = IpPrefix.parse(str(obj["prefix"]))
            if obj.get("raw_host_bits") and not prefix.raw_host_bits:
                prefix = IpPrefix(prefix.family, prefix.address, prefix.length, raw_host_bits=True)
            path = AsPath.from_hops(obj["path"])
        except (KeyError, ValueError, TypeError) as exc:
            stats.record_error(lineno, f"{type(exc).__name__}: {exc}")
            continue

        if align is not None:
            key = align.align(ts)
            if key is None or (file_key is not None and key != file_key):
                stats.record_error(lineno, "timestamp not aligned to the file's snapshot slot")
                continue
            file_key = key
            ts = align.nominal_datetime(key)

        record = _record_from_path(ts, str(coll), peer_asn, peer_ip, prefix, path)
        if record is None:
            stats.as_set_origins += 1
            continue
        records.append(record)
        stats.emitted += 1

    if stats.total and stats.malformed / stats.total > MALFORMED_FATAL_FRACTION:
        raise IngestError(
            f"{stats.source}: {stats.malformed}/{stats.total} malformed lines "
            f"(>{MALFORMED_FATAL_FRACTION:.0%}); first errors: {stats.errors[:3]}"
        )
    return records, stats


def render_normalized(record: RibRecord) -> str:
    """Render one record as a normalized JSONL line (inverse of parse_normalized)."""
    obj = {
        "ts": format_rfc3339(record.snapshot_ts),
        "collector": record.collector,
        "peer_ip": record.peer_ip,
        "peer_asn": record.peer_asn,
        "prefix": str(record.prefix),
        "path": record.as_path.to_hops(),
    }
    if record.prefix.raw_host_bits:
        obj["raw_host_bits"] = True
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def looks_like_jsonl(path: str | Path) -> bool:
    return str(path).endswith((".jsonl", ".json"))


def peek_snapshot_ts(path: str | Path) -> datetime | None:
    """Read a file's first row timestamp without a full parse."""
    if looks_like_jsonl(path):
        with open(path, "rt", encoding="utf-8") as fh:
            for line in fh:
                text = line.strip()
                if not text:
                    continue
                try:
                    return parse_rfc3339(str(json.loads(text)["ts"]))
                except (KeyError, ValueError, TypeError):
                    return None
        return None
    stream = open_rib_stream(path)
    try:
        header = stream.read(mrt.MRT_HEADER.size)
        if len(header) < mrt.MRT_HEADER.size:
            return None
        ts = mrt.MRT_HEADER.unpack(header)[0]
        return datetime.fromtimestamp(ts, tz=timezone.utc)
    finally:
        stream.close()


def parse_rib_file(
    path: str | Path,
    collector: str,
    align: AlignmentConfig | None = None,
) -> tuple[list[RibRecord], IngestStats]:
    """Dispatch on file flavor: normalized JSONL or binary MRT."""
    if looks_like_jsonl(path):
        return parse_normalized(path, collector=collector, align=align)
    return parse_mrt_rib(path, collector=collector, align=align)
