import json
from datetime import datetime, timezone

import pytest

from moasscope.ingest import IngestError, parse_normalized, render_normalized
from moasscope.records import AlignmentConfig


def line(**overrides) -> str:
    obj = {
        "ts": "2023-01-01T08:00:00Z",
        "collector": "rrc00",
        "peer_ip": "192.0.2.1",
        "peer_asn": 65010,
        "prefix": "193.0.0.0/21",
        "path": [65010, 3333],
    }
    obj.update(overrides)
    return json.dumps(obj)


def test_direct_field_mapping():
    records, stats = parse_normalized([line()])
    (rec,) = records
    assert rec.origin_asn == 3333
    assert rec.peer_asn == 65010
    assert rec.collector == "rrc00"
    assert str(rec.prefix) == "193.0.0.0/21"
    assert rec.snapshot_ts == datetime(2023, 1, 1, 8, 0, tzinfo=timezone.utc)
    assert stats.emitted == 1


def test_host_bits_are_masked_and_flagged():
    records, _ = parse_normalized([line(prefix="1.2.3.0/16")])
    assert str(records[0].prefix) == "1.2.0.0/16"
    assert records[0].prefix.raw_host_bits


def test_trailing_as_set_dropped():
    records, stats = parse_normalized([line(path=[65010, [3333, 3356]])])
    assert records == []
    assert stats.as_set_origins == 1
    assert stats.total == 1


def test_malformed_line_counted_with_line_number():
    records, stats = parse_normalized([line(), "{not json"] + [line()] * 9)
    assert len(records) == 10
    assert stats.malformed == 1
    assert stats.errors[0][0] == 2  # 1-based line number


def test_missing_field_is_malformed():
    bad = json.dumps({"ts": "2023-01-01T08:00:00Z", "prefix": "193.0.0.0/21"})
    _, stats = parse_normalized([bad] + [line()] * 9)
    assert stats.malformed == 1


def test_unknown_fields_ignored():
    records, _ = parse_normalized([line(extra="x", comm="64512:1")])
    assert len(records) == 1


def test_blank_lines_skipped():
    _, stats = parse_normalized(["", line(), "   "])
    assert stats.total == 1


def test_more_than_ten_percent_malformed_is_fatal():
    lines = [line() for _ in range(8)] + ["junk", "junk"]
    with pytest.raises(IngestError):
        parse_normalized(lines)


def test_ten_percent_exactly_is_tolerated():
    lines = [line() for _ in range(9)] + ["junk"]
    records, stats = parse_normalized(lines)
    assert len(records) == 9 and stats.malformed == 1


def test_collector_fallback_used_when_absent():
    obj = json.loads(line())
    del obj["collector"]
    records, _ = parse_normalized([json.dumps(obj)], collector="route-views2")
    assert records[0].collector == "route-views2"


def test_stats_partition_holds():
    lines = [line()] * 8 + [line(path=[65010, [1, 2]]), "junk"]
    _, stats = parse_normalized(lines)
    assert stats.total == stats.emitted + stats.as_set_origins + stats.malformed == 10


def test_alignment_rejects_offslot_rows():
    align = AlignmentConfig()
    rows = [line()] * 9 + [line(ts="2023-01-01T14:00:00Z")]
    records, stats = parse_normalized(rows, align=align)
    assert len(records) == 9
    assert stats.malformed == 1


def test_render_round_trip_exact():
    source = [
        line(),
        line(prefix="1.2.3.0/16"),  # re-rendered with the raw_host_bits marker
        line(path=[65010, [3333, 3356], 2914], peer_ip="2001:db8::5", peer_asn=65020),
    ]
    records, _ = parse_normalized(source)
    rendered = [render_normalized(r) for r in records]
    again, stats = parse_normalized(rendered)
    assert stats.malformed == 0
    assert again == records
    assert [r.prefix.raw_host_bits for r in again] == [r.prefix.raw_host_bits for r in records]


def test_file_input(tmp_path):
    path = tmp_path / "dump.jsonl"
    path.write_text(line() + "\n" + line(prefix="10.0.0.0/8") + "\n")
    records, stats = parse_normalized(path)
    assert stats.emitted == 2
    assert stats.source.endswith("dump.jsonl")
