"""End-to-end pipeline over a directory tree of inputs.

Stages: detect (parse + filter + per-snapshot MOAS observations, with an
input-hash cache for incremental reruns), lifetime (timelines, lifetime
CSVs per sensitivity, knee), rpki (monthly ROV classes), profiles
(enriched long-lived MOAS rows), and report (figure tables + checks).

Every output is byte-deterministic: file discovery is sorted, merges are
order-independent, floats are rendered with fixed six-decimal precision,
and JSON is dumped with sorted keys.  Worker parallelism only fans out
per-file parsing; results are reduced in sorted order.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from datetime import date, timedelta
from pathlib import Path

from . import lifetime as lifetime_mod
from . import moas as moas_mod
from . import rpki as rpki_mod
from .datasets import (
    AnycastList,
    As2OrgDb,
    AsRelDb,
    AsdbDb,
    DatedCollection,
    HypergiantDb,
    date_from_filename,
)
from .enrich import MoasProfile, build_profile
from .filters import BogonTables, filter_records
from .ingest import IngestError, parse_rib_file, peek_snapshot_ts
from .records import AlignmentConfig, IpPrefix, SnapshotKey, parse_hhmm

NA = "NA"

OBS_DIR = "observations"
STATS_DIR = "stats"
LIFETIME_DIR = "lifetimes"
ROV_DIR = "rov"
PROFILE_DIR = "profiles"
FIGURE_DIR = "figures"

LIFETIME_HEADER = (
    "prefix,family,first_day,last_day,max_lifetime_days,observability,longevity,n_segments"
)
PROFILE_HEADER = (
    "date,prefix,family,origin_count,origins,max_lifetime_days,observability,longevity,"
    "cidr_group,vis_min,vis_max,vis_diff,rov_class,rel_class,rel_sibling_and_c2p,"
    "business_status,business_a,business_b,hypergiants,anycast"
)


class PipelineError(Exception):
    """Unusable run configuration or inputs."""


def fmt6(value: float) -> str:
    return f"{value:.6f}"


@dataclass
class RunConfig:
    ribs_dir: Path | None = None
    out_dir: Path | None = None
    window_start: date | None = None
    window_end: date | None = None
    roas_dir: Path | None = None
    as_rel_dir: Path | None = None
    as2org_dir: Path | None = None
    asdb_dir: Path | None = None
    hypergiants_file: Path | None = None
    anycast_file: Path | None = None
    bogons_file: Path | None = None
    slots_per_day: int = 1
    nominal_times: tuple[str, ...] = ("08:00",)
    tolerance_minutes: int = 30
    sensitivity: int = 1
    threshold_days: int = lifetime_mod.DEFAULT_THRESHOLD_DAYS
    cap_days: int = lifetime_mod.DEFAULT_CAP_DAYS
    kneedle_sensitivity: float = lifetime_mod.DEFAULT_KNEEDLE_SENSITIVITY
    anycast_match: str = "exact"
    workers: int = 1
    report_day: date | None = None

    _PATHS = (
        "ribs_dir", "out_dir", "roas_dir", "as_rel_dir", "as2org_dir",
        "asdb_dir", "hypergiants_file", "anycast_file", "bogons_file",
    )
    _DATES = ("window_start", "window_end", "report_day")

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        with open(path, "rt", encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls.from_dict(raw, base=Path(path).parent)

    @classmethod
    def from_dict(cls, raw: dict, base: Path | None = None) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in raw.items():
            if key not in known:
                continue
            if value is None:
                kwargs[key] = None
            elif key in cls._PATHS:
                p = Path(value)
                if base is not None and not p.is_absolute():
                    p = base / p
                kwargs[key] = p
            elif key in cls._DATES:
                kwargs[key] = date.fromisoformat(value)
            elif key == "nominal_times":
                kwargs[key] = tuple(value)
            else:
                kwargs[key] = value
        return cls(**kwargs)

    def merged(self, **overrides) -> "RunConfig":
        cfg = RunConfig(**{f.name: getattr(self, f.name) for f in fields(self)})
        for key, value in overrides.items():
            if value is not None:
                setattr(cfg, key, value)
        return cfg

    def validate(self) -> list[str]:
        problems = []
        if self.ribs_dir is None or not Path(self.ribs_dir).is_dir():
            problems.append(f"ribs directory not found: {self.ribs_dir}")
        if self.out_dir is None:
            problems.append("missing output directory")
        if self.window_start is None or self.window_end is None:
            problems.append("missing analysis window")
        elif self.window_end < self.window_start:
            problems.append(f"empty window: {self.window_start}..{self.window_end}")
        if self.sensitivity < 0:
            problems.append("sensitivity must be >= 0")
        if self.slots_per_day != len(self.nominal_times):
            problems.append("nominal_times must list one time per slot")
        if self.anycast_match not in ("exact", "contains"):
            problems.append(f"bad anycast_match: {self.anycast_match}")
        if self.workers < 1:
            problems.append("workers must be >= 1")
        return problems

    def alignment(self) -> AlignmentConfig:
        return AlignmentConfig(
            nominal_times=tuple(parse_hhmm(t) for t in self.nominal_times),
            tolerance=timedelta(minutes=self.tolerance_minutes),
        )

    def tables(self) -> BogonTables:
        if self.bogons_file is not None:
            return BogonTables.load(self.bogons_file)
        return BogonTables.defaults()

    def window(self) -> tuple[date, date]:
        return (self.window_start, self.window_end)

    def fingerprint(self) -> str:
        """Hash of the detect-affecting settings, for cache validity."""
        blob = json.dumps(
            {
                "slots": self.slots_per_day,
                "times": list(self.nominal_times),
                "tolerance": self.tolerance_minutes,
                "window": [str(self.window_start), str(self.window_end)],
                "bogons": str(self.bogons_file) if self.bogons_file else "default",
            },
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def discover_rib_files(ribs_dir: Path) -> list[tuple[Path, str, str]]:
    """All input files under ribs_dir as (path, collector, relpath), sorted.

    The collector is the first directory level under ribs_dir, or the
    file stem for flat layouts; JSONL rows that carry their own collector
    field override it.
    """
    found = []
    root = Path(ribs_dir)
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            if name.startswith("."):
                continue
            path = Path(dirpath) / name
            rel = path.relative_to(root)
            collector = rel.parts[0] if len(rel.parts) > 1 else path.stem
            found.append((path, collector, str(rel)))
    found.sort(key=lambda item: item[2])
    return found


def _parse_one_file(task: tuple) -> dict:
    """Worker task: parse + filter one file, aggregate per-prefix views.

    Returns plain picklable dicts keyed by string forms.
    """
    path_s, collector, relpath, nominal_times, tolerance_minutes, bogons_file = task
    align = AlignmentConfig(
        nominal_times=tuple(parse_hhmm(t) for t in nominal_times),
        tolerance=timedelta(minutes=tolerance_minutes),
    )
    tables = BogonTables.load(bogons_file) if bogons_file else BogonTables.defaults()
    records, ingest_stats = parse_rib_file(path_s, collector, align=align)
    kept, filter_stats = filter_records(records, tables)
    views: dict[str, dict[int, set]] = {}
    for record in kept:
        views.setdefault(str(record.prefix), {}).setdefault(record.origin_asn, set()).add(
            record.peer_identity
        )
    return {
        "relpath": relpath,
        "views": {
            p: {asn: sorted(peers) for asn, peers in origins.items()}
            for p, origins in views.items()
        },
        "ingest": ingest_stats.as_dict() | {"source": relpath},
        "filter": filter_stats.as_dict(),
    }


def stage_detect(cfg: RunConfig) -> list[SnapshotKey]:
    """Build the per-snapshot observation store (cached by input hashes)."""
    align = cfg.alignment()
    out = Path(cfg.out_dir)
    obs_dir = out / OBS_DIR
    stats_dir = out / STATS_DIR
    obs_dir.mkdir(parents=True, exist_ok=True)
    stats_dir.mkdir(parents=True, exist_ok=True)

    rejected: list[dict] = []
    groups: dict[SnapshotKey, list[tuple[Path, str, str]]] = {}
    for path, collector, relpath in discover_rib_files(cfg.ribs_dir):
        ts = peek_snapshot_ts(path)
        key = align.align(ts) if ts is not None else None
        if key is None:
            rejected.append({"file": relpath, "reason": "timestamp aligns to no snapshot slot"})
            continue
        if not cfg.window_start <= key.day <= cfg.window_end:
            rejected.append({"file": relpath, "reason": "outside analysis window"})
            continue
        groups.setdefault(key, []).append((path, collector, relpath))

    # Drop store files for snapshots that no longer have inputs.
    wanted = {key.label for key in groups}
    for path in list(obs_dir.glob("*.jsonl")) + list(obs_dir.glob("*.meta.json")):
        label = path.name[: -len(".meta.json")] if path.name.endswith(".meta.json") else path.name[: -len(".jsonl")]
        if label not in wanted:
            path.unlink()

    index_path = obs_dir / "index.json"
    index: dict = {"fingerprint": cfg.fingerprint(), "snapshots": {}}
    old_snapshots: dict = {}
    if index_path.exists():
        try:
            with open(index_path, "rt", encoding="utf-8") as fh:
                old = json.load(fh)
            if old.get("fingerprint") == index["fingerprint"]:
                old_snapshots = old.get("snapshots", {})
        except (ValueError, OSError):
            old_snapshots = {}

    to_parse: list[tuple[SnapshotKey, tuple[Path, str, str]]] = []
    for key in sorted(groups):
        inputs = {relpath: _sha256_file(path) for path, _c, relpath in groups[key]}
        cached = old_snapshots.get(key.label)
        obs_file = obs_dir / f"{key.label}.jsonl"
        meta_file = obs_dir / f"{key.label}.meta.json"
        if (
            cached
            and cached.get("inputs") == inputs
            and obs_file.exists()
            and meta_file.exists()
        ):
            index["snapshots"][key.label] = cached
            continue
        index["snapshots"][key.label] = {"inputs": inputs, "ingest": {}, "filter": {}}
        for item in groups[key]:
            to_parse.append((key, item))

    tasks = [
        (
            str(path),
            collector,
            relpath,
            list(cfg.nominal_times),
            cfg.tolerance_minutes,
            str(cfg.bogons_file) if cfg.bogons_file else "",
        )
        for _key, (path, collector, relpath) in to_parse
    ]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_parse_one_file, tasks))
    else:
        results = [_parse_one_file(t) for t in tasks]

    merged: dict[SnapshotKey, dict[str, dict[int, set]]] = {}
    for (key, _item), result in zip(to_parse, results):
        entry = index["snapshots"][key.label]
        entry["ingest"][result["relpath"]] = result["ingest"]
        entry["filter"][result["relpath"]] = result["filter"]
        views = merged.setdefault(key, {})
        for prefix_s, origins in result["views"].items():
            target = views.setdefault(prefix_s, {})
            for asn, peers in origins.items():
                target.setdefault(asn, set()).update(tuple(p) for p in peers)

    for key in sorted(merged):
        views = {}
        peer_count: set = set()
        kept_prefixes = {4: 0, 6: 0}
        for prefix_s, origins in merged[key].items():
            prefix = IpPrefix.parse(prefix_s)
            kept_prefixes[prefix.family] += 1
            for peers in origins.values():
                peer_count.update(peers)
            views[prefix] = moas_mod.OriginView(
                prefix, key, {asn: frozenset(peers) for asn, peers in origins.items()}
            )
        observations = moas_mod.detect_moas(views)
        moas_mod.write_observations(Path(cfg.out_dir) / OBS_DIR / f"{key.label}.jsonl", observations)
        moas_counts = {4: 0, 6: 0}
        for obs in observations:
            moas_counts[obs.prefix.family] += 1
        meta = {
            "date": key.day.isoformat(),
            "slot": key.slot,
            "kept_prefixes": {"4": kept_prefixes[4], "6": kept_prefixes[6]},
            "moas_prefixes": {"4": moas_counts[4], "6": moas_counts[6]},
            "peers": len(peer_count),
        }
        with open(Path(cfg.out_dir) / OBS_DIR / f"{key.label}.meta.json", "wt", encoding="utf-8", newline="\n") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")

    with open(index_path, "wt", encoding="utf-8", newline="\n") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    ingest_stats = {}
    filter_totals = {}
    for entry in index["snapshots"].values():
        ingest_stats.update(entry.get("ingest", {}))
        filter_totals.update(entry.get("filter", {}))
    summary = {
        "files": {rel: ingest_stats[rel] for rel in sorted(ingest_stats)},
        "filter": {rel: filter_totals[rel] for rel in sorted(filter_totals)},
        "rejected_files": sorted(rejected, key=lambda r: r["file"]),
        "snapshots": sorted(k.label for k in groups),
    }
    with open(stats_dir / "ingest.json", "wt", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sorted(groups)


def load_observation_store(out_dir: Path) -> dict[SnapshotKey, list[moas_mod.MoasObservation]]:
    store: dict[SnapshotKey, list[moas_mod.MoasObservation]] = {}
    obs_dir = Path(out_dir) / OBS_DIR
    if not obs_dir.is_dir():
        return store
    for path in sorted(obs_dir.glob("*.jsonl")):
        key = SnapshotKey.from_label(path.name[: -len(".jsonl")])
        store[key] = moas_mod.read_observations(path)
    return store


def load_snapshot_meta(out_dir: Path) -> dict[SnapshotKey, dict]:
    meta: dict[SnapshotKey, dict] = {}
    for path in sorted((Path(out_dir) / OBS_DIR).glob("*.meta.json")):
        key = SnapshotKey.from_label(path.name[: -len(".meta.json")])
        with open(path, "rt", encoding="utf-8") as fh:
            meta[key] = json.load(fh)
    return meta


def build_timelines_from_store(
    cfg: RunConfig,
) -> dict[IpPrefix, moas_mod.MoasTimeline]:
    store = load_observation_store(cfg.out_dir)
    flat = [obs for observations in store.values() for obs in observations]
    if not flat:
        return {}
    return moas_mod.build_timelines(flat, cfg.window())


def _write_lifetime_csv(path: Path, results: dict[IpPrefix, lifetime_mod.LifetimeResult]) -> None:
    with open(path, "wt", encoding="utf-8", newline="\n") as fh:
        fh.write(LIFETIME_HEADER + "\n")
        for prefix in sorted(results):
            r = results[prefix]
            fh.write(
                ",".join(
                    (
                        str(prefix),
                        str(prefix.family),
                        r.first_day.isoformat(),
                        r.last_day.isoformat(),
                        str(r.max_lifetime_days),
                        fmt6(r.observability),
                        r.longevity,
                        str(r.n_segments),
                    )
                )
                + "\n"
            )


def stage_lifetime(
    cfg: RunConfig, timelines: dict[IpPrefix, moas_mod.MoasTimeline]
) -> dict[int, dict[IpPrefix, lifetime_mod.LifetimeResult]]:
    """Lifetime CSVs for sensitivities {0,1,3} plus the configured one; knee.json."""
    out = Path(cfg.out_dir) / LIFETIME_DIR
    out.mkdir(parents=True, exist_ok=True)
    all_results: dict[int, dict[IpPrefix, lifetime_mod.LifetimeResult]] = {}
    for s in sorted({0, 1, 3} | {cfg.sensitivity}):
        results = {
            prefix: lifetime_mod.evaluate(tl, s, cfg.threshold_days)
            for prefix, tl in timelines.items()
        }
        all_results[s] = results
        _write_lifetime_csv(out / f"lifetimes.s{s}.csv", results)

    knee_info: dict = {"sensitivity": cfg.sensitivity, "cap_days": cfg.cap_days}
    configured = all_results[cfg.sensitivity]
    knee_config = lifetime_mod.KneeConfig(cfg.cap_days, cfg.kneedle_sensitivity)
    for family, label in ((4, "v4"), (6, "v6"), (None, "all")):
        values = [
            r.max_lifetime_days
            for p, r in configured.items()
            if family is None or p.family == family
        ]
        if not values:
            continue
        try:
            knee, short = lifetime_mod.knee_from_lifetimes(values, knee_config)
            knee_info[label] = {
                "knee_days": knee,
                "short_fraction": round(short, 6),
                "long_fraction": round(1 - short, 6),
            }
        except lifetime_mod.NoKneeError as exc:
            knee_info[label] = {"no_knee": True, "reason": str(exc)}
    with open(out / "knee.json", "wt", encoding="utf-8", newline="\n") as fh:
        json.dump(knee_info, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return all_results


def longlived_prefixes(
    results: dict[IpPrefix, lifetime_mod.LifetimeResult]
) -> set[IpPrefix]:
    return {p for p, r in results.items() if r.longevity == lifetime_mod.LONG_LIVED}


def _roa_file_for_month(roas_dir: Path, month: str) -> Path | None:
    """The ROA snapshot whose filename date falls in the given month."""
    for path in sorted(Path(roas_dir).iterdir()):
        if not path.is_file():
            continue
        d = date_from_filename(path.name)
        if d is not None and rpki_mod.month_label(d) == month:
            return path
    return None


def stage_rpki(
    cfg: RunConfig,
    timelines: dict[IpPrefix, moas_mod.MoasTimeline],
    longlived: set[IpPrefix],
) -> dict[tuple[str, str], str]:
    """Classify each long-lived prefix per month; returns (prefix, month) -> class."""
    out = Path(cfg.out_dir) / ROV_DIR
    out.mkdir(parents=True, exist_ok=True)
    classes: dict[tuple[str, str], str] = {}
    if cfg.roas_dir is None or not Path(cfg.roas_dir).is_dir():
        print("warning: no ROA directory; ROV classes reported as NA", file=sys.stderr)
        with open(out / "rov_classes.csv", "wt", encoding="utf-8", newline="\n") as fh:
            fh.write("month,prefix,family,rov_class\n")
        return classes

    # Per month: the union of each prefix's origins over that month's MOAS days.
    per_month: dict[str, dict[IpPrefix, set[int]]] = {}
    for prefix in longlived:
        for day, obs in timelines[prefix].days.items():
            month = rpki_mod.month_label(day)
            per_month.setdefault(month, {}).setdefault(prefix, set()).update(obs.origin_set)

    roa_sets: dict[str, rpki_mod.RoaSet | None] = {}
    rows: list[tuple[str, str, int, str]] = []
    for month in sorted(per_month):
        if month not in roa_sets:
            roa_file = _roa_file_for_month(Path(cfg.roas_dir), month)
            if roa_file is None:
                print(f"warning: no ROA snapshot for {month}; classes are NA", file=sys.stderr)
                roa_sets[month] = None
            else:
                roa_sets[month] = rpki_mod.load_roas(roa_file, month)
        roa_set = roa_sets[month]
        for prefix in sorted(per_month[month]):
            origins = sorted(per_month[month][prefix])
            if roa_set is None:
                verdict = NA
            else:
                states = [rpki_mod.validate(prefix, o, roa_set) for o in origins]
                verdict = rpki_mod.classify_moas_rov(states)
            classes[(str(prefix), month)] = verdict
            rows.append((month, str(prefix), prefix.family, verdict))

    with open(out / "rov_classes.csv", "wt", encoding="utf-8", newline="\n") as fh:
        fh.write("month,prefix,family,rov_class\n")
        for month, prefix_s, family, verdict in rows:
            fh.write(f"{month},{prefix_s},{family},{verdict}\n")
    return classes


def _maybe_collection(directory: Path | None, loader) -> DatedCollection | None:
    if directory is None:
        return None
    coll = DatedCollection(Path(directory), loader)
    return coll if len(coll) else None


def stage_profiles(
    cfg: RunConfig,
    timelines: dict[IpPrefix, moas_mod.MoasTimeline],
    results: dict[IpPrefix, lifetime_mod.LifetimeResult],
    longlived: set[IpPrefix],
    rov_classes: dict[tuple[str, str], str],
) -> list[MoasProfile]:
    """One profile per long-lived prefix per observed day, written as CSV."""
    out = Path(cfg.out_dir) / PROFILE_DIR
    out.mkdir(parents=True, exist_ok=True)

    rel_coll = _maybe_collection(cfg.as_rel_dir, AsRelDb.load)
    org_coll = _maybe_collection(cfg.as2org_dir, As2OrgDb.load)
    asdb_coll = _maybe_collection(cfg.asdb_dir, AsdbDb.load)
    for name, coll, src in (
        ("as-rel", rel_coll, cfg.as_rel_dir),
        ("as2org", org_coll, cfg.as2org_dir),
        ("asdb", asdb_coll, cfg.asdb_dir),
    ):
        if src is not None and coll is None:
            print(f"warning: no usable {name} snapshots in {src}", file=sys.stderr)
        elif src is None:
            print(f"warning: {name} input missing; related columns are NA", file=sys.stderr)
    hypergiants = None
    if cfg.hypergiants_file and Path(cfg.hypergiants_file).is_file():
        hypergiants = HypergiantDb.load(cfg.hypergiants_file)
    else:
        print("warning: hypergiant list missing; column is NA", file=sys.stderr)
    anycast = None
    if cfg.anycast_file and Path(cfg.anycast_file).is_file():
        anycast = AnycastList.load(cfg.anycast_file)
    else:
        print("warning: anycast list missing; column is NA", file=sys.stderr)

    by_day: dict[date, list[IpPrefix]] = {}
    for prefix in longlived:
        for day in timelines[prefix].days:
            by_day.setdefault(day, []).append(prefix)

    profiles: list[MoasProfile] = []
    for day in sorted(by_day):
        rel_db = rel_coll.latest_at(day) if rel_coll else None
        org_db = org_coll.latest_at(day) if org_coll else None
        asdb_db = asdb_coll.latest_at(day) if asdb_coll else None
        month = rpki_mod.month_label(day)
        for prefix in sorted(by_day[day]):
            obs = timelines[prefix].days[day]
            profiles.append(
                build_profile(
                    obs,
                    results[prefix],
                    rov_class=rov_classes.get((str(prefix), month)),
                    rel_db=rel_db,
                    org_db=org_db,
                    asdb=asdb_db,
                    hypergiants=hypergiants,
                    anycast=anycast,
                    anycast_match=cfg.anycast_match,
                )
            )

    with open(out / "profiles.csv", "wt", encoding="utf-8", newline="\n") as fh:
        fh.write(PROFILE_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for p in profiles:
            business = p.business
            writer.writerow(
                (
                    p.day.isoformat(),
                    str(p.prefix),
                    p.prefix.family,
                    p.origin_count,
                    " ".join(str(a) for a in p.origin_set),
                    p.max_lifetime_days,
                    fmt6(p.observability),
                    p.longevity,
                    p.cidr_group,
                    p.vis_min,
                    p.vis_max,
                    p.vis_diff,
                    p.rov_class if p.rov_class is not None else NA,
                    p.rel_class if p.rel_class is not None else NA,
                    ("true" if p.rel_sibling_and_c2p else "false") if p.rel_class else NA,
                    business.status if business else NA,
                    (business.cat_a or "") if business else NA,
                    (business.cat_b or "") if business else NA,
                    ";".join(p.hypergiant_orgs),
                    ("true" if p.anycast else "false") if p.anycast is not None else NA,
                )
            )
    return profiles


def run_pipeline(cfg: RunConfig) -> dict:
    """Execute every stage; returns the run summary (also written to disk)."""
    problems = cfg.validate()
    if problems:
        raise PipelineError("; ".join(problems))
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    snapshots = stage_detect(cfg)
    timelines = build_timelines_from_store(cfg)
    results_by_s = stage_lifetime(cfg, timelines)
    configured = results_by_s[cfg.sensitivity]
    longlived = longlived_prefixes(configured)
    rov_classes = stage_rpki(cfg, timelines, longlived)
    profiles = stage_profiles(cfg, timelines, configured, longlived, rov_classes)

    from . import reports  # late import; reports reads the artifacts written above

    report_day = cfg.report_day or cfg.window_end
    reports.emit_all(cfg, report_day)
    ok, checks = reports.run_checks(cfg)

    summary = {
        "window": [cfg.window_start.isoformat(), cfg.window_end.isoformat()],
        "snapshots": len(snapshots),
        "moas_prefixes": len(timelines),
        "longlived_prefixes": len(longlived),
        "profile_rows": len(profiles),
        "report_day": report_day.isoformat(),
        "checks_ok": ok,
        "checks": checks,
    }
    with open(out / "run_summary.json", "wt", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
