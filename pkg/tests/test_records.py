from datetime import date, datetime, time, timedelta, timezone

import pytest

from moasscope.records import (
    AlignmentConfig,
    AsPath,
    IpPrefix,
    SnapshotKey,
    align_snapshot,
    format_rfc3339,
    parse_rfc3339,
)


class TestIpPrefix:
    def test_parse_masks_host_bits(self):
        p = IpPrefix.parse("1.2.3.0/16")
        assert str(p) == "1.2.0.0/16"
        assert p.raw_host_bits

    def test_clean_prefix_keeps_no_flag(self):
        p = IpPrefix.parse("193.0.0.0/21")
        assert str(p) == "193.0.0.0/21"
        assert not p.raw_host_bits

    def test_remasking_is_idempotent(self):
        p = IpPrefix.parse("1.2.3.0/16")
        again = IpPrefix.parse(str(p))
        assert str(again) == str(p)
        assert not again.raw_host_bits

    def test_host_bits_flag_does_not_split_identity(self):
        dirty = IpPrefix.parse("1.2.3.0/16")
        clean = IpPrefix.parse("1.2.0.0/16")
        assert dirty == clean
        assert hash(dirty) == hash(clean)

    def test_v6(self):
        p = IpPrefix.parse("2001:db8::1/32")
        assert str(p) == "2001:db8::/32"
        assert p.raw_host_bits
        assert p.bits == 128

    def test_length_bounds(self):
        with pytest.raises(ValueError):
            IpPrefix.parse("10.0.0.0/33")
        with pytest.raises(ValueError):
            IpPrefix.parse("10.0.0.0")

    def test_contains(self):
        big = IpPrefix.parse("10.0.0.0/8")
        small = IpPrefix.parse("10.5.0.0/16")
        assert big.contains(small)
        assert not small.contains(big)
        assert big.contains(big)
        assert not big.contains(IpPrefix.parse("11.0.0.0/16"))
        # different CIDR sizes of the same address are distinct objects
        assert IpPrefix.parse("10.0.0.0/8") != IpPrefix.parse("10.0.0.0/9")

    def test_zero_length(self):
        default = IpPrefix.parse("0.0.0.0/0")
        assert default.length == 0
        assert default.contains(IpPrefix.parse("151.80.0.0/22"))

    def test_ordering_groups_by_family(self):
        prefixes = [
            IpPrefix.parse("2001:db8::/32"),
            IpPrefix.parse("10.0.0.0/8"),
            IpPrefix.parse("9.0.0.0/8"),
        ]
        ordered = sorted(prefixes)
        assert [p.family for p in ordered] == [4, 4, 6]


class TestAsPath:
    def test_origin_is_last_sequence_element(self):
        path = AsPath.from_hops([65010, 3333])
        assert path.origin() == 3333
        assert not path.ends_in_set()

    def test_trailing_set_has_no_origin(self):
        path = AsPath.from_hops([65010, [3333, 3356]])
        assert path.origin() is None
        assert path.ends_in_set()

    def test_inner_set_is_fine(self):
        path = AsPath.from_hops([65010, [1, 2], 3333])
        assert path.origin() == 3333

    def test_prepending_collapses_to_last(self):
        path = AsPath.from_hops([65010, 3333, 3333, 3333])
        assert path.origin() == 3333

    def test_hops_round_trip(self):
        hops = [65010, [3333, 3356], 2914]
        assert AsPath.from_hops(hops).to_hops() == hops

    def test_empty_path(self):
        assert AsPath.from_hops([]).origin() is None

    def test_rejects_junk(self):
        with pytest.raises(ValueError):
            AsPath.from_hops([65010, "x"])


class TestAlignment:
    CFG = AlignmentConfig()

    def test_exact_match(self):
        key = align_snapshot(datetime(2022, 6, 13, 8, 0, tzinfo=timezone.utc), self.CFG)
        assert key == SnapshotKey(date(2022, 6, 13), 0)

    def test_within_tolerance(self):
        key = align_snapshot(datetime(2022, 6, 13, 8, 12, tzinfo=timezone.utc), self.CFG)
        assert key == SnapshotKey(date(2022, 6, 13), 0)

    def test_outside_tolerance_rejected(self):
        assert align_snapshot(datetime(2022, 6, 13, 11, 0, tzinfo=timezone.utc), self.CFG) is None

    def test_midnight_slot_rolls_to_next_day(self):
        cfg = AlignmentConfig(nominal_times=(time(0, 0),))
        key = align_snapshot(datetime(2022, 6, 13, 23, 45, tzinfo=timezone.utc), cfg)
        assert key == SnapshotKey(date(2022, 6, 14), 0)

    def test_three_slot_mode(self):
        cfg = AlignmentConfig(nominal_times=(time(0, 0), time(8, 0), time(16, 0)))
        assert cfg.slots_per_day == 3
        key = align_snapshot(datetime(2022, 6, 13, 16, 20, tzinfo=timezone.utc), cfg)
        assert key == SnapshotKey(date(2022, 6, 13), 2)

    def test_nominal_datetime_round_trip(self):
        key = SnapshotKey(date(2022, 6, 13), 0)
        assert self.CFG.nominal_datetime(key) == datetime(2022, 6, 13, 8, 0, tzinfo=timezone.utc)

    def test_snapshot_key_label(self):
        key = SnapshotKey(date(2022, 6, 13), 2)
        assert key.label == "2022-06-13.s2"
        assert SnapshotKey.from_label(key.label) == key


def test_rfc3339_round_trip():
    ts = parse_rfc3339("2023-01-01T08:00:00Z")
    assert ts == datetime(2023, 1, 1, 8, 0, tzinfo=timezone.utc)
    assert format_rfc3339(ts) == "2023-01-01T08:00:00Z"
    assert parse_rfc3339("2023-01-01T09:00:00+01:00") == ts
