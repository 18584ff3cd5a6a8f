import random

import pytest

from moasscope.records import IpPrefix, prefix_mask
from moasscope.rpki import (
    ALL_INVALID,
    ALL_VALID,
    AT_LEAST_ONE_VALID,
    MIXED_INVALID_NOT_FOUND,
    NOT_FOUND,
    ROV_INVALID,
    ROV_NOT_FOUND,
    ROV_VALID,
    RoaRecord,
    RoaSet,
    classify_moas_rov,
    load_roas,
    month_label,
    validate,
)


def roa(prefix, max_length, asn):
    return RoaRecord(IpPrefix.parse(prefix), max_length, asn, "2023-01")


def linear_validate(prefix, origin, roas):
    """Independent oracle: scan every ROA and apply the state rules directly."""
    covering = [
        r
        for r in roas
        if r.prefix.family == prefix.family
        and r.prefix.length <= prefix.length
        and (prefix.address & prefix_mask(prefix.bits, r.prefix.length)) == r.prefix.address
    ]
    if not covering:
        return ROV_NOT_FOUND
    if any(r.asn == origin and prefix.length <= r.max_length for r in covering):
        return ROV_VALID
    return ROV_INVALID


SET = [roa("10.0.0.0/16", 24, 65001)]


class TestValidate:
    def test_valid(self):
        assert validate(IpPrefix.parse("10.0.5.0/24"), 65001, RoaSet(SET)) == ROV_VALID

    def test_invalid_exceeds_max_length(self):
        assert validate(IpPrefix.parse("10.0.5.0/25"), 65001, RoaSet(SET)) == ROV_INVALID

    def test_not_found(self):
        assert validate(IpPrefix.parse("192.0.2.0/24"), 65001, RoaSet(SET)) == ROV_NOT_FOUND

    def test_wrong_origin_invalid(self):
        assert validate(IpPrefix.parse("10.0.5.0/24"), 65002, RoaSet(SET)) == ROV_INVALID

    def test_any_matching_roa_suffices(self):
        roas = RoaSet(SET + [roa("10.0.0.0/16", 24, 65002)])
        assert validate(IpPrefix.parse("10.0.5.0/24"), 65002, roas) == ROV_VALID

    def test_exact_prefix_roa(self):
        roas = RoaSet([roa("10.0.5.0/24", 24, 65001)])
        assert validate(IpPrefix.parse("10.0.5.0/24"), 65001, roas) == ROV_VALID

    def test_max_length_equality_boundary(self):
        roas = RoaSet([roa("10.0.0.0/16", 16, 65001)])
        assert validate(IpPrefix.parse("10.0.0.0/16"), 65001, roas) == ROV_VALID
        assert validate(IpPrefix.parse("10.0.0.0/17"), 65001, roas) == ROV_INVALID

    def test_v6(self):
        roas = RoaSet([roa("2a01:4f8::/32", 48, 24940)])
        assert validate(IpPrefix.parse("2a01:4f8:10::/48"), 24940, roas) == ROV_VALID
        assert validate(IpPrefix.parse("2a01:4f8:10::/49"), 24940, roas) == ROV_INVALID


class TestClassify:
    @pytest.mark.parametrize(
        "states,expected",
        [
            ((ROV_VALID, ROV_VALID), ALL_VALID),
            ((ROV_VALID, ROV_INVALID), AT_LEAST_ONE_VALID),
            ((ROV_VALID, ROV_NOT_FOUND), AT_LEAST_ONE_VALID),
            ((ROV_INVALID, ROV_INVALID), ALL_INVALID),
            ((ROV_NOT_FOUND, ROV_NOT_FOUND, ROV_NOT_FOUND), NOT_FOUND),
            ((ROV_INVALID, ROV_NOT_FOUND), MIXED_INVALID_NOT_FOUND),
            ((ROV_VALID, ROV_VALID, ROV_INVALID, ROV_NOT_FOUND), AT_LEAST_ONE_VALID),
        ],
    )
    def test_classes(self, states, expected):
        assert classify_moas_rov(states) == expected

    def test_single_state_is_an_error(self):
        with pytest.raises(ValueError):
            classify_moas_rov([ROV_VALID])

    def test_unknown_state_rejected(self):
        with pytest.raises(ValueError):
            classify_moas_rov([ROV_VALID, "Bogus"])


class TestLoadRoas:
    CSV = """URI,ASN,IP Prefix,Max Length,Not Before,Not After
rsync://rpki.example/a.roa,AS65001,10.0.0.0/16,24,,
rsync://rpki.example/a.roa,AS65001,10.0.0.0/16,24,,
rsync://rpki.example/b.roa,65002,192.0.2.0/24,,2022-12-01,2023-06-30
rsync://rpki.example/c.roa,AS65003,10.0.0.0/24,16,,
rsync://rpki.example/d.roa,AS65004,198.51.100.0/24,24,2021-01-01,2021-12-31
"""

    def test_load(self, tmp_path):
        path = tmp_path / "roas-2023-01.csv"
        path.write_text(self.CSV)
        roas = load_roas(path, "2023-01")
        # duplicate collapsed, bad max_length skipped, expired window skipped
        assert len(roas) == 2
        assert roas.stats.duplicates == 1
        assert roas.stats.skipped_malformed == 1
        assert roas.stats.skipped_expired == 1
        assert validate(IpPrefix.parse("10.0.5.0/24"), 65001, roas) == ROV_VALID
        # empty max-length defaults to the prefix length
        assert validate(IpPrefix.parse("192.0.2.0/24"), 65002, roas) == ROV_VALID
        assert validate(IpPrefix.parse("192.0.2.128/25"), 65002, roas) == ROV_INVALID

    def test_month_label(self):
        from datetime import date

        assert month_label(date(2023, 1, 15)) == "2023-01"


class TestOracleEquivalence:
    def test_randomized_agreement(self):
        rng = random.Random(20230101)
        checked = 0
        for _ in range(120):
            roas = []
            for _ in range(rng.randint(1, 30)):
                if rng.random() < 0.8:
                    length = rng.randint(8, 24)
                    addr = rng.getrandbits(32) & prefix_mask(32, length)
                    p = IpPrefix(4, addr, length)
                    max_len = rng.randint(length, min(length + 8, 32))
                else:
                    length = rng.randint(19, 48)
                    addr = rng.getrandbits(128) & prefix_mask(128, length)
                    p = IpPrefix(6, addr, length)
                    max_len = rng.randint(length, min(length + 16, 128))
                roas.append(RoaRecord(p, max_len, rng.choice([65001, 65002, 65003]), "2023-01"))
            indexed = RoaSet(roas)
            for _ in range(40):
                base = rng.choice(roas)
                family = base.prefix.family
                bits = base.prefix.bits
                if rng.random() < 0.7:  # derived from a ROA: cover/boundary cases
                    length = min(bits, base.prefix.length + rng.randint(0, 10))
                    addr = base.prefix.address | (
                        rng.getrandbits(bits) & ~prefix_mask(bits, base.prefix.length)
                    )
                    query = IpPrefix(family, addr & prefix_mask(bits, length), length)
                else:  # fully random, usually uncovered
                    length = rng.randint(8, bits)
                    query = IpPrefix(
                        family, rng.getrandbits(bits) & prefix_mask(bits, length), length
                    )
                origin = rng.choice([65001, 65002, 65003, 65009])
                assert validate(query, origin, indexed) == linear_validate(query, origin, roas)
                checked += 1
        assert checked == 4800
