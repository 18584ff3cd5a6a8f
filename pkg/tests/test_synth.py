import hashlib
import json
from datetime import date
from pathlib import Path

import pytest

from moasscope.filters import BogonTables, filter_records
from moasscope.ingest import parse_normalized
from moasscope.synth import (
    CollectorSpec,
    EventSpec,
    Scenario,
    generate,
    validate_scenario,
)


def scenario(**overrides) -> Scenario:
    base = dict(
        seed=11,
        start_date=date(2022, 6, 1),
        window_days=45,
        collectors=(CollectorSpec("rc00", 8), CollectorSpec("rc01", 8)),
        background_prefixes=10,
        events=(
            EventSpec(
                "StableMoas",
                prefix="151.80.0.0/22",
                origins=(3333, 12859),
                start_day=1,
                end_day=40,
                visibility={3333: 9, 12859: 2},
            ),
            EventSpec(
                "ShortHijack",
                prefix="185.40.0.0/24",
                origins=(2914, 398465),
                start_day=10,
                end_day=12,
                visibility={2914: 4, 398465: 2},
            ),
        ),
    )
    base.update(overrides)
    return Scenario(**base)


def tree_hash(root: Path) -> dict[str, str]:
    return {
        str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestValidation:
    def test_valid_scenario_is_ok(self):
        assert validate_scenario(scenario()) == []

    def test_long_hijack_rejected(self):
        sc = scenario(
            events=(
                EventSpec(
                    "ShortHijack",
                    prefix="185.40.0.0/24",
                    origins=(2914, 398465),
                    start_day=1,
                    end_day=45,
                    visibility={2914: 4, 398465: 2},
                ),
            )
        )
        assert any("must stay below" in p for p in validate_scenario(sc))

    def test_range_outside_window_rejected(self):
        sc = scenario(window_days=30)
        assert any("outside window" in p for p in validate_scenario(sc))

    def test_short_stable_rejected(self):
        sc = scenario(
            events=(
                EventSpec(
                    "StableMoas",
                    prefix="151.80.0.0/22",
                    origins=(3333, 12859),
                    start_day=1,
                    end_day=10,
                    visibility={3333: 9, 12859: 2},
                ),
            )
        )
        assert any("must reach" in p for p in validate_scenario(sc))

    def test_reserved_origin_rejected(self):
        sc = scenario(
            events=(
                EventSpec(
                    "StableMoas",
                    prefix="151.80.0.0/22",
                    origins=(3333, 64512),
                    start_day=1,
                    end_day=40,
                    visibility={3333: 9, 64512: 2},
                ),
            )
        )
        assert any("reserved" in p for p in validate_scenario(sc))

    def test_conflicting_prefix_days_rejected(self):
        extra = EventSpec(
            "Flapping",
            prefix="151.80.0.0/22",
            origins=(200001, 2914),
            start_day=35,
            end_day=45,
            visibility={200001: 1, 2914: 1},
            gap_on=2,
            gap_off=1,
        )
        sc = scenario(events=scenario().events + (extra,))
        assert any("conflict" in p for p in validate_scenario(sc))

    def test_pin_to_unknown_collector_rejected(self):
        sc = scenario(
            events=(
                EventSpec(
                    "StableMoas",
                    prefix="151.80.0.0/22",
                    origins=(3333, 12859),
                    start_day=1,
                    end_day=40,
                    visibility={3333: 9, 12859: 2},
                    pin={12859: "nowhere"},
                ),
            )
        )
        assert any("unknown collector" in p for p in validate_scenario(sc))

    def test_unknown_collector_outage_rejected(self):
        sc = scenario(events=(EventSpec("CollectorOutage", collector="nope", start_day=1, end_day=1),))
        assert any("unknown collector" in p for p in validate_scenario(sc))

    def test_generate_refuses_invalid(self, tmp_path):
        sc = scenario(window_days=5)
        with pytest.raises(ValueError, match="invalid scenario"):
            generate(sc, tmp_path)


class TestGeneration:
    def test_byte_identical_given_same_seed(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        generate(scenario(), a)
        generate(scenario(), b)
        assert tree_hash(a) == tree_hash(b)

    def test_seed_changes_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        generate(scenario(), a)
        generate(scenario(seed=12), b)
        assert tree_hash(a) != tree_hash(b)

    def test_dataset_parses_clean(self, tmp_path):
        generate(scenario(), tmp_path)
        total_malformed = 0
        rows = 0
        for path in sorted((tmp_path / "ribs").rglob("*.jsonl")):
            records, stats = parse_normalized(path)
            total_malformed += stats.malformed
            rows += stats.total
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert total_malformed == 0
        assert rows == manifest["records"]

    def test_manifest_truths_by_construction(self, tmp_path):
        manifest = generate(scenario(), tmp_path)
        stable = manifest["prefixes"]["151.80.0.0/22"]
        assert stable["moas_days"] == list(range(1, 41))
        assert stable["max_lifetime"] == {"0": 40, "1": 40, "3": 40}
        assert stable["longevity"]["1"] == "LongLived"
        assert stable["observability"] == 1.0
        assert stable["per_origin_visibility"]["3333"]["1"] == 9
        hijack = manifest["prefixes"]["185.40.0.0/24"]
        assert hijack["moas_days"] == [10, 11, 12]
        assert hijack["longevity"]["1"] == "ShortLived"

    def test_flapping_gap_pattern(self, tmp_path):
        sc = scenario(
            events=(
                EventSpec(
                    "Flapping",
                    prefix="151.80.0.0/22",
                    origins=(3333, 12859),
                    start_day=1,
                    end_day=20,
                    visibility={3333: 3, 12859: 2},
                    gap_on=10,
                    gap_off=1,
                ),
            )
        )
        manifest = generate(sc, tmp_path)
        entry = manifest["prefixes"]["151.80.0.0/22"]
        assert entry["moas_days"] == list(range(1, 11)) + list(range(12, 21))
        assert entry["segments"]["0"] == [[1, 10], [12, 20]]
        assert entry["segments"]["1"] == [[1, 20]]
        assert entry["observability"] == 0.95

    def test_outage_effect_on_manifest(self, tmp_path):
        # origin 12859 visible only via rc01; rc01 misses day 20
        sc = scenario(
            collectors=(CollectorSpec("rc00", 8), CollectorSpec("rc01", 8)),
            events=(
                EventSpec(
                    "StableMoas",
                    prefix="151.80.0.0/22",
                    origins=(3333, 12859),
                    start_day=1,
                    end_day=40,
                    visibility={3333: 8, 12859: 1},
                    pin={3333: "rc00", 12859: "rc01"},
                ),
                EventSpec("CollectorOutage", collector="rc01", start_day=20, end_day=20),
            ),
        )
        manifest = generate(sc, tmp_path)
        entry = manifest["prefixes"]["151.80.0.0/22"]
        assert entry["moas_days"] == [d for d in range(1, 41) if d != 20]
        assert entry["max_lifetime"]["1"] == 40
        assert entry["segments"]["0"] == [[1, 19], [21, 40]]
        assert entry["max_lifetime"]["0"] == 20
        assert entry["per_origin_visibility"]["12859"]["19"] == 1
        assert "20" not in entry["per_origin_visibility"]["12859"]

    def test_bogon_census_counts_records(self, tmp_path):
        bogons = {
            "ReservedAsn": 3,
            "DefaultRoute": 1,
            "SpecialPurposePrefix": 2,
            "HostBitsSet": 2,
            "Multicast": 1,
        }
        manifest = generate(scenario(bogons=bogons), tmp_path)
        assert manifest["bogon_census"] == bogons
        records = []
        for path in sorted((tmp_path / "ribs").rglob("*.jsonl")):
            rs, _ = parse_normalized(path)
            records.extend(rs)
        _, stats = filter_records(records, BogonTables.defaults())
        assert dict(stats.dropped) == bogons

    def test_scenario_json_round_trip(self, tmp_path):
        sc = scenario()
        path = tmp_path / "scenario.json"
        sc.save(path)
        again = Scenario.load(path)
        assert again.to_dict() == sc.to_dict()

    def test_aux_datasets_written(self, tmp_path):
        generate(scenario(), tmp_path)
        aux = tmp_path / "aux"
        assert (aux / "hypergiants.json").is_file()
        assert (aux / "anycast_prefixes.txt").is_file()
        assert list((aux / "as-rel").glob("*.txt"))
        assert list((aux / "as2org").glob("*.jsonl"))
        assert list((aux / "asdb").glob("*.csv"))
        # one ROA snapshot per window month (June and the July spill-over)
        roas = sorted(p.name for p in (aux / "roas").glob("*.csv"))
        assert roas == ["roas-2022-06.csv", "roas-2022-07.csv"]
