"""Deterministic synthetic RIB datasets with a ground-truth manifest.

A scenario injects MOAS phenomena (stable conflicts, mergers, short
hijacks, flapping announcements, collector outages, anycast prefixes)
into multi-collector normalized JSONL dumps, together with single-origin
background noise and optional bogon records for filter accounting.

The manifest records, per prefix, the effective truths after applying
outages: MOAS days, per-origin visibility, lifetime segments per
sensitivity, maximum lifetime, observability, and longevity.  It is
computed from the emitted records by an independent derivation (boolean
gap filling over the window) so it can serve as an oracle for the
pipeline.  Identical (scenario, seed) inputs produce byte-identical
datasets and manifests.
"""

from __future__ import annotations

import ipaddress
import json
import random
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

from .filters import BogonTables, classify_prefix, is_reserved_asn, PASS
from .records import IpPrefix, format_rfc3339, parse_hhmm

STABLE_MOAS = "StableMoas"
MERGER_MOAS = "MergerMoas"
SHORT_HIJACK = "ShortHijack"
FLAPPING = "Flapping"
COLLECTOR_OUTAGE = "CollectorOutage"
ANYCAST_MOAS = "AnycastMoas"

EVENT_KINDS = (STABLE_MOAS, MERGER_MOAS, SHORT_HIJACK, FLAPPING, COLLECTOR_OUTAGE, ANYCAST_MOAS)
MOAS_KINDS = (STABLE_MOAS, MERGER_MOAS, SHORT_HIJACK, FLAPPING, ANYCAST_MOAS)

LONG_LIVED_MIN_DAYS = 30  # Stable/Merger must reach it, ShortHijack must not

SENSITIVITIES = (0, 1, 3)

# First octets for generated IPv4 background space, all outside the
# special-purpose and multicast tables.
_SAFE_V4_OCTETS = (5, 23, 31, 37, 41, 45, 57, 62, 66, 77, 81, 89, 93,
                   101, 107, 123, 131, 137, 141, 151, 157, 163, 167, 173,
                   179, 185, 190, 199, 205, 211, 217, 221)

_SPECIAL_SAMPLES = (
    "203.0.113.0/24", "192.0.2.0/24", "198.51.100.0/24",
    "10.0.0.0/8", "172.16.0.0/12", "2001:db8::/32",
)
_MULTICAST_SAMPLES = ("224.0.2.0/24", "239.1.0.0/16", "233.252.0.0/24", "ff3e::/32")

_IT = "Computer and Information Technology"
_BUSINESS_ROTATION = (_IT, "Service", "Media, Publishing, and Broadcasting", "Retail Stores, Wholesale, and E-commerce Sites")


@dataclass(frozen=True)
class CollectorSpec:
    name: str
    peers: int


@dataclass
class EventSpec:
    kind: str
    prefix: str | None = None
    origins: tuple[int, ...] = ()
    start_day: int = 1
    end_day: int = 1
    visibility: dict[int, int] = field(default_factory=dict)
    gap_on: int | None = None  # Flapping: days announced per cycle
    gap_off: int | None = None  # Flapping: days silent per cycle
    collector: str | None = None  # CollectorOutage target
    # Restrict an origin's peers to one collector (e.g. to stage an
    # origin that disappears with a collector outage).
    pin: dict[int, str] = field(default_factory=dict)

    @property
    def duration(self) -> int:
        return self.end_day - self.start_day + 1

    def present_days(self) -> list[int]:
        days = range(self.start_day, self.end_day + 1)
        if self.kind != FLAPPING:
            return list(days)
        cycle = (self.gap_on or 0) + (self.gap_off or 0)
        return [d for d in days if (d - self.start_day) % cycle < (self.gap_on or 0)]

    @classmethod
    def from_dict(cls, obj: dict) -> "EventSpec":
        return cls(
            kind=str(obj["kind"]),
            prefix=obj.get("prefix"),
            origins=tuple(int(a) for a in obj.get("origins", ())),
            start_day=int(obj.get("start_day", 1)),
            end_day=int(obj.get("end_day", obj.get("start_day", 1))),
            visibility={int(k): int(v) for k, v in obj.get("visibility", {}).items()},
            gap_on=obj.get("gap_on"),
            gap_off=obj.get("gap_off"),
            collector=obj.get("collector"),
            pin={int(k): str(v) for k, v in obj.get("pin", {}).items()},
        )

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "start_day": self.start_day, "end_day": self.end_day}
        if self.prefix:
            out["prefix"] = self.prefix
        if self.origins:
            out["origins"] = list(self.origins)
        if self.visibility:
            out["visibility"] = {str(k): v for k, v in sorted(self.visibility.items())}
        if self.gap_on is not None:
            out["gap_on"] = self.gap_on
        if self.gap_off is not None:
            out["gap_off"] = self.gap_off
        if self.collector:
            out["collector"] = self.collector
        if self.pin:
            out["pin"] = {str(k): v for k, v in sorted(self.pin.items())}
        return out


@dataclass
class Scenario:
    seed: int = 1
    start_date: date = date(2022, 6, 1)
    window_days: int = 60
    collectors: tuple[CollectorSpec, ...] = (CollectorSpec("rc00", 20), CollectorSpec("rc01", 20))
    events: tuple[EventSpec, ...] = ()
    slots_per_day: int = 1
    nominal_times: tuple[str, ...] = ("08:00",)
    background_prefixes: int | None = None  # None: 100 per MOAS event
    bogons: dict[str, int] = field(default_factory=dict)

    @property
    def end_date(self) -> date:
        return self.start_date + timedelta(days=self.window_days - 1)

    def n_background(self) -> int:
        if self.background_prefixes is not None:
            return self.background_prefixes
        return 100 * sum(1 for e in self.events if e.kind in MOAS_KINDS)

    @classmethod
    def from_dict(cls, obj: dict) -> "Scenario":
        return cls(
            seed=int(obj.get("seed", 1)),
            start_date=date.fromisoformat(obj.get("start_date", "2022-06-01")),
            window_days=int(obj["window_days"]),
            collectors=tuple(
                CollectorSpec(str(c["name"]), int(c["peers"])) for c in obj["collectors"]
            ),
            events=tuple(EventSpec.from_dict(e) for e in obj.get("events", ())),
            slots_per_day=int(obj.get("slots_per_day", 1)),
            nominal_times=tuple(obj.get("nominal_times", ("08:00",))),
            background_prefixes=obj.get("background_prefixes"),
            bogons={str(k): int(v) for k, v in obj.get("bogons", {}).items()},
        )

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "start_date": self.start_date.isoformat(),
            "window_days": self.window_days,
            "collectors": [{"name": c.name, "peers": c.peers} for c in self.collectors],
            "events": [e.to_dict() for e in self.events],
            "slots_per_day": self.slots_per_day,
            "nominal_times": list(self.nominal_times),
            "background_prefixes": self.background_prefixes,
            "bogons": dict(sorted(self.bogons.items())),
        }

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        with open(path, "rt", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def save(self, path: str | Path) -> None:
        with open(path, "wt", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def validate_scenario(scenario: Scenario) -> list[str]:
    """Check every event invariant; an empty list means the scenario is sound."""
    problems: list[str] = []
    if scenario.window_days < 1:
        problems.append("window_days must be >= 1")
    if scenario.slots_per_day != len(scenario.nominal_times):
        problems.append("nominal_times must list one time per slot")
    collector_names = {c.name for c in scenario.collectors}
    if len(collector_names) != len(scenario.collectors):
        problems.append("duplicate collector names")
    pool_size = sum(c.peers for c in scenario.collectors)
    tables = BogonTables.defaults()

    spans: dict[str, list[tuple[int, int, int]]] = {}
    for i, ev in enumerate(scenario.events):
        where = f"event[{i}] {ev.kind}"
        if ev.kind not in EVENT_KINDS:
            problems.append(f"{where}: unknown kind")
            continue
        if not 1 <= ev.start_day <= ev.end_day <= scenario.window_days:
            problems.append(f"{where}: day range {ev.start_day}..{ev.end_day} outside window")
        if ev.kind == COLLECTOR_OUTAGE:
            if ev.collector not in collector_names:
                problems.append(f"{where}: unknown collector {ev.collector!r}")
            if ev.prefix or ev.origins:
                problems.append(f"{where}: outages take no prefix/origins")
            continue
        if ev.kind == SHORT_HIJACK and ev.duration >= LONG_LIVED_MIN_DAYS:
            problems.append(f"{where}: hijack duration {ev.duration} must stay below {LONG_LIVED_MIN_DAYS}")
        if ev.kind in (STABLE_MOAS, MERGER_MOAS) and ev.duration < LONG_LIVED_MIN_DAYS:
            problems.append(f"{where}: duration {ev.duration} must reach {LONG_LIVED_MIN_DAYS}")
        if ev.kind == FLAPPING and (not ev.gap_on or not ev.gap_off or ev.gap_on < 1 or ev.gap_off < 1):
            problems.append(f"{where}: flapping needs gap_on/gap_off >= 1")
        if not ev.prefix:
            problems.append(f"{where}: missing prefix")
            continue
        try:
            prefix = IpPrefix.parse(ev.prefix)
        except ValueError as exc:
            problems.append(f"{where}: {exc}")
            continue
        if prefix.raw_host_bits or classify_prefix(prefix, tables).kind != PASS:
            problems.append(f"{where}: prefix {ev.prefix} would be filtered out")
        if len(set(ev.origins)) < 2:
            problems.append(f"{where}: needs at least two distinct origins")
        peers_per_collector = {c.name: c.peers for c in scenario.collectors}
        for asn in ev.origins:
            if is_reserved_asn(asn, tables):
                problems.append(f"{where}: origin {asn} is reserved and would be filtered")
            target = ev.visibility.get(asn, 0)
            pinned = ev.pin.get(asn)
            limit = peers_per_collector.get(pinned, pool_size) if pinned else pool_size
            if pinned and pinned not in peers_per_collector:
                problems.append(f"{where}: origin {asn} pinned to unknown collector {pinned!r}")
            if target < 1:
                problems.append(f"{where}: origin {asn} needs a visibility target >= 1")
            elif target > limit:
                problems.append(f"{where}: visibility {target} exceeds peer pool {limit}")
        spans.setdefault(str(prefix), []).append((ev.start_day, ev.end_day, i))

    for prefix, ranges in spans.items():
        ranges.sort()
        for (s1, e1, i1), (s2, _e2, i2) in zip(ranges, ranges[1:]):
            if s2 <= e1:
                problems.append(
                    f"events[{i1}] and events[{i2}] conflict on {prefix}: overlapping days"
                )
    return problems


@dataclass(frozen=True)
class _Peer:
    collector: str
    ip: str
    asn: int


def _peer_pool(scenario: Scenario) -> list[_Peer]:
    pool: list[_Peer] = []
    idx = 0
    for ci, coll in enumerate(scenario.collectors):
        for pi in range(coll.peers):
            pool.append(
                _Peer(coll.name, f"10.{ci + 1}.{pi // 250}.{pi % 250 + 1}", 3_000_000 + idx)
            )
            idx += 1
    return pool


def _event_rng(scenario: Scenario, index: int, label: str) -> random.Random:
    # One named stream per event keeps records stable under scenario edits.
    return random.Random(f"{scenario.seed}:{index}:{label}")


def _gen_v4_prefix(rng: random.Random, used: set[str]) -> IpPrefix:
    while True:
        length = rng.choice((16, 18, 20, 21, 22, 23, 24))
        addr = (rng.choice(_SAFE_V4_OCTETS) << 24) | (rng.getrandbits(16) << 8)
        prefix = IpPrefix.from_int(4, addr, length)
        text = str(prefix)
        if text not in used:
            used.add(text)
            return IpPrefix.parse(text)


def _gen_v6_prefix(rng: random.Random, used: set[str]) -> IpPrefix:
    while True:
        group0 = rng.choice((0x2400, 0x2402, 0x2600, 0x2602, 0x2a00, 0x2a02, 0x2c00))
        length = rng.choice((32, 40, 48))
        addr = (group0 << 112) | (rng.getrandbits(16) << 96) | (rng.getrandbits(16) << 80)
        prefix = IpPrefix.from_int(6, addr, length)
        text = str(prefix)
        if text not in used:
            used.add(text)
            return IpPrefix.parse(text)


def _merge_runs(present: set[int], sensitivity: int) -> list[list[int]]:
    """Segment derivation used for manifest truths: fill interior gaps of
    at most `sensitivity` missing days, then take maximal runs."""
    days = sorted(present)
    filled = set(days)
    for a, b in zip(days, days[1:]):
        if b - a - 1 <= sensitivity:
            filled.update(range(a + 1, b))
    runs: list[list[int]] = []
    for d in sorted(filled):
        if runs and d == runs[-1][1] + 1:
            runs[-1][1] = d
        else:
            runs.append([d, d])
    return runs


def generate(scenario: Scenario, out_dir: str | Path) -> dict:
    """Write the dataset under out_dir (ribs/, aux/, manifest.json).

    Returns the manifest as a dict.  Raises ValueError when the scenario
    fails validation.
    """
    problems = validate_scenario(scenario)
    if problems:
        raise ValueError("invalid scenario: " + "; ".join(problems))

    out = Path(out_dir)
    ribs = out / "ribs"
    aux = out / "aux"
    out.mkdir(parents=True, exist_ok=True)
    aux.mkdir(parents=True, exist_ok=True)

    pool = _peer_pool(scenario)
    pool_by_collector: dict[str, list[_Peer]] = {}
    for peer in pool:
        pool_by_collector.setdefault(peer.collector, []).append(peer)
    nominal = [parse_hhmm(t) for t in scenario.nominal_times]

    # Outage days per collector.
    outages: dict[str, set[int]] = {}
    for ev in scenario.events:
        if ev.kind == COLLECTOR_OUTAGE:
            outages.setdefault(ev.collector or "", set()).update(
                range(ev.start_day, ev.end_day + 1)
            )

    # Chosen peers per (prefix, origin); presence days per (prefix, origin).
    used_prefixes: set[str] = {str(IpPrefix.parse(e.prefix)) for e in scenario.events if e.prefix}
    chosen: dict[tuple[str, int], list[_Peer]] = {}
    presence: dict[tuple[str, int], set[int]] = {}
    prefix_kinds: dict[str, list[str]] = {}
    for i, ev in enumerate(scenario.events):
        if ev.kind == COLLECTOR_OUTAGE:
            continue
        rng = _event_rng(scenario, i, ev.kind)
        prefix = str(IpPrefix.parse(ev.prefix or ""))
        prefix_kinds.setdefault(prefix, []).append(ev.kind)
        days = set(ev.present_days())
        for asn in ev.origins:
            key = (prefix, asn)
            if key not in chosen:
                source = pool_by_collector[ev.pin[asn]] if asn in ev.pin else pool
                chosen[key] = sorted(
                    rng.sample(source, ev.visibility[asn]),
                    key=lambda p: (p.collector, p.asn),
                )
            presence.setdefault(key, set()).update(days)

    # Background noise: single-origin prefixes visible on every day.
    bg_rng = _event_rng(scenario, -1, "background")
    background: list[tuple[IpPrefix, int, list[_Peer]]] = []
    for bi in range(scenario.n_background()):
        prefix = (
            _gen_v6_prefix(bg_rng, used_prefixes)
            if bi % 5 == 4
            else _gen_v4_prefix(bg_rng, used_prefixes)
        )
        origin = bg_rng.randrange(2, 23000)
        peers = sorted(
            bg_rng.sample(pool, bg_rng.randrange(1, 6)), key=lambda p: (p.collector, p.asn)
        )
        background.append((prefix, origin, peers))

    # Bogon records for filter accounting, emitted on day 1 slot 0.
    bogon_rng = _event_rng(scenario, -2, "bogons")
    bogon_rows: list[tuple[str, str, int, bool]] = []  # (prefix_text, kind, origin, host_bits)
    census: dict[str, int] = {}
    for kind in sorted(scenario.bogons):
        count = scenario.bogons[kind]
        census[kind] = count
        for j in range(count):
            if kind == "ReservedAsn":
                p = _gen_v4_prefix(bogon_rng, used_prefixes)
                bogon_rows.append((str(p), kind, 64512 + j, False))
            elif kind == "DefaultRoute":
                bogon_rows.append(("0.0.0.0/0" if j % 2 == 0 else "::/0", kind, 3356, False))
            elif kind == "SpecialPurposePrefix":
                bogon_rows.append((_SPECIAL_SAMPLES[j % len(_SPECIAL_SAMPLES)], kind, 3356, False))
            elif kind == "HostBitsSet":
                p = _gen_v4_prefix(bogon_rng, used_prefixes)
                # set one bit past the mask so the source text carries host bits
                dirty = ipaddress.IPv4Address(p.address | (1 << (32 - p.length - 1)))
                bogon_rows.append((f"{dirty}/{p.length}", kind, 3356, True))
            elif kind == "Multicast":
                bogon_rows.append((_MULTICAST_SAMPLES[j % len(_MULTICAST_SAMPLES)], kind, 3356, False))
            else:
                raise ValueError(f"unknown bogon kind {kind!r}")

    # Emit one JSONL file per (collector, day, slot).
    files = 0
    records = 0
    for day in range(1, scenario.window_days + 1):
        day_date = scenario.start_date + timedelta(days=day - 1)
        for coll in scenario.collectors:
            if day in outages.get(coll.name, ()):
                continue
            for slot in range(scenario.slots_per_day):
                ts = format_rfc3339(
                    datetime.combine(day_date, nominal[slot], tzinfo=timezone.utc)
                )
                lines: list[str] = []

                def emit(prefix_text: str, origin: int, peer: _Peer) -> None:
                    lines.append(
                        json.dumps(
                            {
                                "ts": ts,
                                "collector": peer.collector,
                                "peer_ip": peer.ip,
                                "peer_asn": peer.asn,
                                "prefix": prefix_text,
                                "path": [peer.asn, origin],
                            },
                            sort_keys=True,
                            separators=(",", ":"),
                        )
                    )

                for (prefix_text, asn), days in sorted(presence.items()):
                    if day not in days:
                        continue
                    for peer in chosen[(prefix_text, asn)]:
                        if peer.collector == coll.name:
                            emit(prefix_text, asn, peer)
                for prefix, origin, peers in background:
                    for peer in peers:
                        if peer.collector == coll.name:
                            emit(str(prefix), origin, peer)
                if day == 1 and slot == 0 and coll.name == scenario.collectors[0].name:
                    first_peer = pool_by_collector[coll.name][0]
                    for prefix_text, _kind, origin, _hb in bogon_rows:
                        emit(prefix_text, origin, first_peer)

                if not lines:
                    continue
                target_dir = ribs / coll.name
                target_dir.mkdir(parents=True, exist_ok=True)
                name = f"{day_date.strftime('%Y%m%d')}.{nominal[slot].strftime('%H%M')}.jsonl"
                with open(target_dir / name, "wt", encoding="utf-8", newline="\n") as fh:
                    for line in sorted(lines):
                        fh.write(line + "\n")
                files += 1
                records += len(lines)

    manifest = _build_manifest(scenario, presence, chosen, outages, prefix_kinds, census, files, records)
    with open(out / "manifest.json", "wt", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_aux(scenario, aux)
    return manifest


def _build_manifest(
    scenario: Scenario,
    presence: dict[tuple[str, int], set[int]],
    chosen: dict[tuple[str, int], list[_Peer]],
    outages: dict[str, set[int]],
    prefix_kinds: dict[str, list[str]],
    census: dict[str, int],
    files: int,
    records: int,
) -> dict:
    per_prefix: dict[str, dict[int, dict[int, int]]] = {}  # prefix -> day -> origin -> count
    for (prefix, asn), days in presence.items():
        peers = chosen[(prefix, asn)]
        for day in days:
            count = sum(1 for p in peers if day not in outages.get(p.collector, ()))
            if count > 0:
                per_prefix.setdefault(prefix, {}).setdefault(day, {})[asn] = count

    prefixes: dict[str, dict] = {}
    for prefix, day_map in sorted(per_prefix.items()):
        moas_days = sorted(d for d, origins in day_map.items() if len(origins) >= 2)
        if not moas_days:
            continue
        visibility = {
            str(asn): {str(d): day_map[d][asn] for d in moas_days if asn in day_map[d]}
            for asn in sorted({a for d in moas_days for a in day_map[d]})
        }
        present = set(moas_days)
        segments = {}
        max_life = {}
        longevity = {}
        for s in SENSITIVITIES:
            runs = _merge_runs(present, s)
            segments[str(s)] = [[a, b] for a, b in runs]
            life = max(b - a + 1 for a, b in runs)
            max_life[str(s)] = life
            longevity[str(s)] = "LongLived" if life >= LONG_LIVED_MIN_DAYS else "ShortLived"
        span = max(moas_days) - min(moas_days) + 1
        prefixes[prefix] = {
            "family": IpPrefix.parse(prefix).family,
            "kinds": sorted(set(prefix_kinds.get(prefix, ()))),
            "anycast": ANYCAST_MOAS in prefix_kinds.get(prefix, ()),
            "moas_days": moas_days,
            "per_origin_visibility": visibility,
            "segments": segments,
            "max_lifetime": max_life,
            "observability": len(moas_days) / span,
            "longevity": longevity,
        }

    return {
        "start_date": scenario.start_date.isoformat(),
        "window_days": scenario.window_days,
        "slots_per_day": scenario.slots_per_day,
        "nominal_times": list(scenario.nominal_times),
        "collectors": [c.name for c in scenario.collectors],
        "sensitivities": list(SENSITIVITIES),
        "longevity_threshold_days": LONG_LIVED_MIN_DAYS,
        "bogon_census": census,
        "prefixes": prefixes,
        "files": files,
        "records": records,
    }


def _write_aux(scenario: Scenario, aux: Path) -> None:
    """Small companion datasets so every enrichment stage can run end to end.

    ROA coverage rotates per event over all-valid, one-valid, all-invalid,
    and absent, so the ROV classifier sees every reachable class.
    """
    stamp = scenario.start_date.strftime("%Y%m%d")
    moas_events = [e for e in scenario.events if e.kind in MOAS_KINDS]

    rel_lines: list[str] = []
    org_lines: list[str] = []
    asdb_rows: list[str] = ["ASN,Category 1 - Layer 1,Category 1 - Layer 2"]
    roa_rows: list[str] = ["URI,ASN,IP Prefix,Max Length,Not Before,Not After"]
    org_seen: set[str] = set()
    asn_seen: set[int] = set()
    hypergiants: dict[str, list[int]] = {}
    anycast: list[str] = []

    def add_org(org_id: str, name: str) -> None:
        if org_id not in org_seen:
            org_seen.add(org_id)
            org_lines.append(
                json.dumps(
                    {"type": "Organization", "organizationId": org_id, "name": name},
                    sort_keys=True,
                )
            )

    def add_asn(asn: int, org_id: str) -> None:
        if asn not in asn_seen:
            asn_seen.add(asn)
            org_lines.append(
                json.dumps(
                    {"type": "ASN", "asn": asn, "organizationId": org_id}, sort_keys=True
                )
            )

    for i, ev in enumerate(moas_events):
        origins = sorted(set(ev.origins))
        if ev.kind == MERGER_MOAS:
            org_id = f"@merged-{i}"
            add_org(org_id, f"Merged Networks {i}")
            for asn in origins:
                add_asn(asn, org_id)
        else:
            for asn in origins:
                org_id = f"@org-{asn}"
                add_org(org_id, f"Org {asn}")
                add_asn(asn, org_id)
        if ev.kind == STABLE_MOAS and len(origins) == 2:
            rel = -1 if i % 2 == 0 else 0
            rel_lines.append(f"{origins[0]}|{origins[1]}|{rel}")
        if ev.kind == ANYCAST_MOAS and ev.prefix:
            anycast.append(str(IpPrefix.parse(ev.prefix)))
        prefix_text = str(IpPrefix.parse(ev.prefix)) if ev.prefix else None
        if prefix_text:
            plen = IpPrefix.parse(prefix_text).length
            mode = i % 4  # AllValid, AtLeastOneValid, AllInvalid, NotFound
            if mode == 0:
                authorized = origins
            elif mode == 1:
                authorized = origins[:1]
            elif mode == 2:
                authorized = [12345 if 12345 not in origins else 54321]
            else:
                authorized = []
            for asn in authorized:
                roa_rows.append(f"rsync://roa.invalid/{i},AS{asn},{prefix_text},{plen},,")
        for j, asn in enumerate(origins):
            if i % 7 == 3 and j == 0:
                continue  # leave one origin uncategorized
            cats = [_BUSINESS_ROTATION[(i + j) % len(_BUSINESS_ROTATION)]]
            if i % 5 == 2 and j == 1:
                cats.append("Education and Research")  # multi-category case
            cells = ",".join(f"{c},{c} - General" for c in cats)
            asdb_rows.append(f"AS{asn},{cells}")
        if i == 0 and origins:
            hypergiants.setdefault("examplecdn", []).append(origins[0])

    (aux / "as-rel").mkdir(exist_ok=True)
    (aux / "as2org").mkdir(exist_ok=True)
    (aux / "asdb").mkdir(exist_ok=True)
    (aux / "roas").mkdir(exist_ok=True)
    months = sorted(
        {
            f"{d.year:04d}-{d.month:02d}"
            for d in (scenario.start_date + timedelta(days=i) for i in range(scenario.window_days))
        }
    )
    for month in months:
        with open(aux / "roas" / f"roas-{month}.csv", "wt", encoding="utf-8", newline="\n") as fh:
            for row in roa_rows:
                fh.write(row + "\n")
    with open(aux / "as-rel" / f"{stamp}.as-rel.txt", "wt", encoding="utf-8", newline="\n") as fh:
        fh.write("# synthetic inter-AS relationships\n")
        for line in sorted(set(rel_lines)):
            fh.write(line + "\n")
    with open(aux / "as2org" / f"{stamp}.as-org2info.jsonl", "wt", encoding="utf-8", newline="\n") as fh:
        for line in org_lines:
            fh.write(line + "\n")
    with open(aux / "asdb" / f"{stamp}_categorized_ases.csv", "wt", encoding="utf-8", newline="\n") as fh:
        for row in asdb_rows:
            fh.write(row + "\n")
    with open(aux / "hypergiants.json", "wt", encoding="utf-8", newline="\n") as fh:
        json.dump({k: sorted(v) for k, v in sorted(hypergiants.items())}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(aux / "anycast_prefixes.txt", "wt", encoding="utf-8", newline="\n") as fh:
        for prefix in sorted(set(anycast)):
            fh.write(prefix + "\n")
