"""Plot-ready figure tables and report reconciliation checks.

Each emitter produces one deterministic CSV from the pipeline artifacts
(observation store, lifetime CSVs, ROV classes, profiles), covering:

  fig1       long-lived MOAS prefixes and origin ASes over time
  fig2-left  lifetime CDFs per sensitivity
  fig2-right observability CDF
  fig3       capped lifetime CDF plus knee rows
  fig4       MOAS fraction of all prefixes over time
  fig5       ROV classes over time
  fig6       CIDR size groups over time
  fig7-*     origins per prefix / prefixes per origin set (one day)
  fig8       PO visibility buckets over time
  fig9       min/max/diff visibility CDFs (one day)
  fig10      relationship classes over time
  fig11      business category heatmap matrix (one day)

`run_checks` verifies that every classification partitions its
population and that figure row counts reconcile with upstream artifacts.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from datetime import date
from pathlib import Path

from . import lifetime as lifetime_mod
from .enrich import BUSINESS_MATCHED, VISIBILITY_BUCKETS, visibility_bucket
from .rpki import ROV_CLASSES
from .pipeline import (
    FIGURE_DIR,
    LIFETIME_DIR,
    NA,
    OBS_DIR,
    PROFILE_DIR,
    ROV_DIR,
    RunConfig,
    fmt6,
    load_observation_store,
    load_snapshot_meta,
)

FIGURE_IDS = (
    "fig1", "fig2-left", "fig2-right", "fig3", "fig4", "fig5", "fig6",
    "fig7-left", "fig7-right", "fig8", "fig9", "fig10", "fig11",
)


def _read_csv(path: Path) -> list[dict]:
    if not path.is_file():
        return []
    with open(path, "rt", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wt", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _profiles(cfg: RunConfig) -> list[dict]:
    return _read_csv(Path(cfg.out_dir) / PROFILE_DIR / "profiles.csv")


def _lifetimes(cfg: RunConfig, sensitivity: int) -> list[dict]:
    return _read_csv(Path(cfg.out_dir) / LIFETIME_DIR / f"lifetimes.s{sensitivity}.csv")


def _longlived_set(cfg: RunConfig) -> set[str]:
    return {
        row["prefix"]
        for row in _lifetimes(cfg, cfg.sensitivity)
        if row["longevity"] == lifetime_mod.LONG_LIVED
    }


def _figure_path(cfg: RunConfig, figure_id: str) -> Path:
    return Path(cfg.out_dir) / FIGURE_DIR / f"{figure_id}.csv"


def emit_fig1(cfg: RunConfig) -> Path:
    per_day: dict[tuple[str, str], tuple[int, set[int]]] = {}
    for row in _profiles(cfg):
        key = (row["date"], row["family"])
        count, origins = per_day.get(key, (0, set()))
        origins = origins | {int(a) for a in row["origins"].split()}
        per_day[key] = (count + 1, origins)
    rows = [
        (day, family, count, len(origins))
        for (day, family), (count, origins) in sorted(per_day.items())
    ]
    return _write_csv(
        _figure_path(cfg, "fig1"),
        ["date", "family", "longlived_prefixes", "origin_ases"],
        rows,
    )


def _cdf_rows(values: list[int], cap: int) -> list[tuple[int, str]]:
    x, y = lifetime_mod.lifetime_cdf(values, cap)
    return [(int(xi), fmt6(float(yi))) for xi, yi in zip(x, y)]


def emit_fig2_left(cfg: RunConfig) -> Path:
    window_len = (cfg.window_end - cfg.window_start).days + 1
    rows = []
    for s in (0, 1, 3):
        data = _lifetimes(cfg, s)
        for family in ("4", "6"):
            values = [int(r["max_lifetime_days"]) for r in data if r["family"] == family]
            if not values:
                continue
            for days, cdf in _cdf_rows(values, window_len):
                rows.append((family, s, days, cdf))
    return _write_csv(
        _figure_path(cfg, "fig2-left"), ["family", "sensitivity", "days", "cdf"], rows
    )


def emit_fig2_right(cfg: RunConfig) -> Path:
    rows = []
    data = _lifetimes(cfg, cfg.sensitivity)
    for family in ("4", "6"):
        values = sorted(float(r["observability"]) for r in data if r["family"] == family)
        if not values:
            continue
        for i in range(101):
            x = i / 100
            frac = sum(1 for v in values if v <= x) / len(values)
            rows.append((family, fmt6(x), fmt6(frac)))
    return _write_csv(
        _figure_path(cfg, "fig2-right"), ["family", "observability", "cdf"], rows
    )


def emit_fig3(cfg: RunConfig) -> Path:
    rows = []
    data = _lifetimes(cfg, cfg.sensitivity)
    knee_config = lifetime_mod.KneeConfig(cfg.cap_days, cfg.kneedle_sensitivity)
    for family, selector in (("4", "4"), ("6", "6"), ("all", None)):
        values = [
            int(r["max_lifetime_days"])
            for r in data
            if selector is None or r["family"] == selector
        ]
        if not values:
            continue
        for days, cdf in _cdf_rows(values, cfg.cap_days):
            rows.append((family, "cdf", days, cdf))
        try:
            knee, short = lifetime_mod.knee_from_lifetimes(values, knee_config)
            rows.append((family, "knee", int(knee), fmt6(short)))
        except lifetime_mod.NoKneeError:
            rows.append((family, "knee", "", ""))
    return _write_csv(_figure_path(cfg, "fig3"), ["family", "kind", "days", "value"], rows)


def emit_fig4(cfg: RunConfig) -> Path:
    # With several slots per day the day-level total is the max over
    # slots (distinct-prefix unions are not recoverable from counts).
    meta = load_snapshot_meta(Path(cfg.out_dir))
    per_day: dict[tuple[str, str], list[int]] = {}
    for key, m in meta.items():
        for family in ("4", "6"):
            entry = per_day.setdefault((key.day.isoformat(), family), [0, 0])
            entry[0] = max(entry[0], int(m["kept_prefixes"][family]))
            entry[1] = max(entry[1], int(m["moas_prefixes"][family]))
    longlived_per_day = Counter()
    for row in _profiles(cfg):
        longlived_per_day[(row["date"], row["family"])] += 1
    rows = []
    for (day, family), (total, moas_count) in sorted(per_day.items()):
        ll = longlived_per_day.get((day, family), 0)
        moas_frac = moas_count / total if total else 0.0
        ll_frac = ll / total if total else 0.0
        rows.append((day, family, total, moas_count, ll, fmt6(moas_frac), fmt6(ll_frac)))
    return _write_csv(
        _figure_path(cfg, "fig4"),
        ["date", "family", "all_prefixes", "moas_prefixes", "longlived_moas",
         "moas_fraction", "longlived_fraction"],
        rows,
    )


def emit_fig5(cfg: RunConfig) -> Path:
    data = _read_csv(Path(cfg.out_dir) / ROV_DIR / "rov_classes.csv")
    counts: Counter = Counter()
    totals: Counter = Counter()
    for row in data:
        counts[(row["month"], row["family"], row["rov_class"])] += 1
        totals[(row["month"], row["family"])] += 1
    rows = []
    for (month, family, rov_class), count in sorted(counts.items()):
        frac = count / totals[(month, family)]
        rows.append((month, family, rov_class, count, fmt6(frac)))
    return _write_csv(
        _figure_path(cfg, "fig5"), ["month", "family", "rov_class", "prefixes", "fraction"], rows
    )


def emit_fig6(cfg: RunConfig) -> Path:
    counts: Counter = Counter()
    for row in _profiles(cfg):
        counts[(row["date"], row["family"], row["cidr_group"])] += 1
    rows = [(d, f, g, c) for (d, f, g), c in sorted(counts.items())]
    return _write_csv(
        _figure_path(cfg, "fig6"), ["date", "family", "cidr_group", "prefixes"], rows
    )


def _day_profiles(cfg: RunConfig, day: date) -> list[dict]:
    iso = day.isoformat()
    return [row for row in _profiles(cfg) if row["date"] == iso]


def emit_fig7(cfg: RunConfig, day: date) -> list[Path]:
    day_rows = _day_profiles(cfg, day)
    per_prefix: Counter = Counter()
    per_set: Counter = Counter()
    for row in day_rows:
        per_prefix[(row["family"], int(row["origin_count"]))] += 1
        per_set[(row["family"], row["origins"])] += 1
    left = [(f, n, c) for (f, n), c in sorted(per_prefix.items())]
    set_sizes: Counter = Counter()
    for (family, _origins), n_prefixes in per_set.items():
        set_sizes[(family, n_prefixes)] += 1
    right = [(f, n, c) for (f, n), c in sorted(set_sizes.items())]
    return [
        _write_csv(
            _figure_path(cfg, "fig7-left"), ["family", "origins_per_prefix", "prefixes"], left
        ),
        _write_csv(
            _figure_path(cfg, "fig7-right"),
            ["family", "prefixes_per_origin_set", "origin_sets"],
            right,
        ),
    ]


def emit_fig8(cfg: RunConfig) -> Path:
    longlived = _longlived_set(cfg)
    store = load_observation_store(Path(cfg.out_dir))
    counts: Counter = Counter()
    seen: set[tuple[str, str, int]] = set()
    for key in sorted(store):
        day = key.day.isoformat()
        for obs in store[key]:
            prefix_s = str(obs.prefix)
            if prefix_s not in longlived:
                continue
            for asn in obs.origin_set:
                po = (day, prefix_s, asn)
                if po in seen:
                    continue  # same PO pair seen in an earlier slot that day
                seen.add(po)
                bucket = visibility_bucket(obs.visibility[asn])
                counts[(day, str(obs.prefix.family), bucket)] += 1
    rows = [(d, f, b, c) for (d, f, b), c in sorted(counts.items())]
    return _write_csv(_figure_path(cfg, "fig8"), ["date", "family", "bucket", "po_pairs"], rows)


def emit_fig9(cfg: RunConfig, day: date) -> Path:
    rows = []
    day_rows = _day_profiles(cfg, day)
    for family in ("4", "6"):
        fam_rows = [r for r in day_rows if r["family"] == family]
        if not fam_rows:
            continue
        for stat, column in (("min", "vis_min"), ("max", "vis_max"), ("diff", "vis_diff")):
            values = sorted(int(r[column]) for r in fam_rows)
            for x in sorted(set(values)):
                frac = sum(1 for v in values if v <= x) / len(values)
                rows.append((family, stat, x, fmt6(frac)))
    return _write_csv(
        _figure_path(cfg, "fig9"), ["family", "stat", "visibility", "cdf"], rows
    )


def emit_fig10(cfg: RunConfig) -> Path:
    counts: Counter = Counter()
    for row in _profiles(cfg):
        counts[(row["date"], row["family"], row["rel_class"])] += 1
    rows = [(d, f, r, c) for (d, f, r), c in sorted(counts.items())]
    return _write_csv(
        _figure_path(cfg, "fig10"), ["date", "family", "rel_class", "prefixes"], rows
    )


def emit_fig11(cfg: RunConfig, day: date) -> Path:
    matrix: Counter = Counter()
    for row in _day_profiles(cfg, day):
        if row["business_status"] != BUSINESS_MATCHED:
            continue
        a, b = sorted((row["business_a"], row["business_b"]))
        matrix[(a, b)] += 1
        if a != b:
            matrix[(b, a)] += 1
    rows = [(a, b, c) for (a, b), c in sorted(matrix.items())]
    return _write_csv(
        _figure_path(cfg, "fig11"), ["category_a", "category_b", "prefixes"], rows
    )


def emit_figure_data(cfg: RunConfig, figure_id: str, day: date | None = None) -> list[Path]:
    """Emit one figure's CSV; 'fig2' and 'fig7' emit both halves."""
    day = day or cfg.report_day or cfg.window_end
    emitters = {
        "fig1": lambda: [emit_fig1(cfg)],
        "fig2": lambda: [emit_fig2_left(cfg), emit_fig2_right(cfg)],
        "fig2-left": lambda: [emit_fig2_left(cfg)],
        "fig2-right": lambda: [emit_fig2_right(cfg)],
        "fig3": lambda: [emit_fig3(cfg)],
        "fig4": lambda: [emit_fig4(cfg)],
        "fig5": lambda: [emit_fig5(cfg)],
        "fig6": lambda: [emit_fig6(cfg)],
        "fig7": lambda: emit_fig7(cfg, day),
        "fig7-left": lambda: emit_fig7(cfg, day)[:1],
        "fig7-right": lambda: emit_fig7(cfg, day)[1:],
        "fig8": lambda: [emit_fig8(cfg)],
        "fig9": lambda: [emit_fig9(cfg, day)],
        "fig10": lambda: [emit_fig10(cfg)],
        "fig11": lambda: [emit_fig11(cfg, day)],
    }
    if figure_id not in emitters:
        raise ValueError(f"unknown figure id: {figure_id}")
    return emitters[figure_id]()


def emit_all(cfg: RunConfig, day: date | None = None) -> list[Path]:
    paths: list[Path] = []
    for figure_id in FIGURE_IDS:
        paths.extend(emit_figure_data(cfg, figure_id, day))
    return paths


def run_checks(cfg: RunConfig) -> tuple[bool, dict]:
    """Partition and reconciliation checks over the emitted artifacts."""
    checks: dict[str, dict] = {}
    profiles = _profiles(cfg)
    figures = Path(cfg.out_dir) / FIGURE_DIR

    def add(name: str, ok: bool, detail: str = "") -> None:
        checks[name] = {"ok": bool(ok), "detail": detail}

    # Longevity classes partition every timeline.
    for s in (0, 1, 3):
        rows = _lifetimes(cfg, s)
        classed = sum(
            1 for r in rows if r["longevity"] in (lifetime_mod.SHORT_LIVED, lifetime_mod.LONG_LIVED)
        )
        add(f"longevity_partition_s{s}", classed == len(rows), f"{classed}/{len(rows)}")

    # ROV classes partition the classified prefix-months.
    rov_rows = _read_csv(Path(cfg.out_dir) / ROV_DIR / "rov_classes.csv")
    bad_rov = [r for r in rov_rows if r["rov_class"] not in (*ROV_CLASSES, NA)]
    fig5 = _read_csv(figures / "fig5.csv")
    add(
        "rov_partition",
        not bad_rov and sum(int(r["prefixes"]) for r in fig5) == len(rov_rows),
        f"{len(rov_rows)} prefix-months",
    )

    # CIDR groups partition the profile rows per day.
    fig6 = _read_csv(figures / "fig6.csv")
    cidr_total = sum(int(r["prefixes"]) for r in fig6)
    add("cidr_partition", cidr_total == len(profiles), f"{cidr_total}/{len(profiles)}")

    # Visibility buckets partition all long-lived PO pairs per day.
    fig8 = _read_csv(figures / "fig8.csv")
    bucket_total = sum(int(r["po_pairs"]) for r in fig8)
    po_total = sum(int(r["origin_count"]) for r in profiles)
    bad_buckets = [r for r in fig8 if r["bucket"] not in VISIBILITY_BUCKETS]
    add(
        "visibility_partition",
        not bad_buckets and bucket_total == po_total,
        f"{bucket_total}/{po_total}",
    )

    # Relationship classes partition the profile rows.
    fig10 = _read_csv(figures / "fig10.csv")
    rel_total = sum(int(r["prefixes"]) for r in fig10)
    add("relationship_partition", rel_total == len(profiles), f"{rel_total}/{len(profiles)}")

    # fig1 reconciles with the profile rows.
    fig1 = _read_csv(figures / "fig1.csv")
    fig1_total = sum(int(r["longlived_prefixes"]) for r in fig1)
    add("fig1_reconciles", fig1_total == len(profiles), f"{fig1_total}/{len(profiles)}")

    # fig7 totals reconcile with the report day population.
    report_day = (cfg.report_day or cfg.window_end).isoformat()
    day_count = sum(1 for r in profiles if r["date"] == report_day)
    fig7_left = _read_csv(figures / "fig7-left.csv")
    left_total = sum(int(r["prefixes"]) for r in fig7_left)
    fig7_right = _read_csv(figures / "fig7-right.csv")
    right_total = sum(
        int(r["prefixes_per_origin_set"]) * int(r["origin_sets"]) for r in fig7_right
    )
    add(
        "fig7_reconciles",
        left_total == day_count and right_total == day_count,
        f"left {left_total}, right {right_total}, day {day_count}",
    )

    # fig11 is symmetric and its unordered sum equals the matched pairs.
    fig11 = _read_csv(figures / "fig11.csv")
    cells = {(r["category_a"], r["category_b"]): int(r["prefixes"]) for r in fig11}
    symmetric = all(cells.get((b, a)) == c for (a, b), c in cells.items())
    unordered = sum(c for (a, b), c in cells.items() if a <= b)
    matched = sum(
        1
        for r in profiles
        if r["date"] == report_day and r["business_status"] == BUSINESS_MATCHED
    )
    add("fig11_symmetric", symmetric and unordered == matched, f"{unordered}/{matched}")

    ok = all(entry["ok"] for entry in checks.values())
    report_path = Path(cfg.out_dir) / "report_checks.json"
    with open(report_path, "wt", encoding="utf-8", newline="\n") as fh:
        json.dump({"ok": ok, "checks": checks}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ok, checks
