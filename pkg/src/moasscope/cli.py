"""Command-line interface.

Subcommands mirror the pipeline stages: convert (MRT to JSONL), detect,
lifetime, knee, rpki, enrich, report, synth, and run (end to end).
A JSON run-config file can be pointed to by --config or the
MOASSCOPE_CONFIG environment variable; explicit flags override it.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from datetime import date
from pathlib import Path

from . import lifetime as lifetime_mod
from . import reports
from .ingest import IngestError, parse_mrt_rib, render_normalized
from .mrt import MrtDecodeError
from .pipeline import (
    PipelineError,
    RunConfig,
    build_timelines_from_store,
    load_observation_store,
    longlived_prefixes,
    run_pipeline,
    stage_detect,
    stage_lifetime,
    stage_profiles,
    stage_rpki,
)
from .synth import Scenario, generate, validate_scenario


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="run-config JSON (default: $MOASSCOPE_CONFIG)")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--sensitivity", type=int, help="missing-day tolerance (default 1)")
    sub.add_argument("--slots-per-day", type=int, dest="slots_per_day")
    sub.add_argument("--nominal-times", dest="nominal_times",
                     help="comma-separated HH:MM dump times (default 08:00)")
    sub.add_argument("--threshold-days", type=int, dest="threshold_days",
                     help="long-lived threshold in days (default 30)")
    sub.add_argument("--cap-days", type=int, dest="cap_days",
                     help="lifetime cap for the knee CDF (default 365)")
    sub.add_argument("--kneedle-sensitivity", type=float, dest="kneedle_sensitivity")
    sub.add_argument("--anycast-match", dest="anycast_match", choices=("exact", "contains"))
    sub.add_argument("--workers", type=int, help="parallel file decoders (default 1)")


def _add_input_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--ribs", help="directory tree of RIB files (one subdir per collector)")
    sub.add_argument("--window-start", dest="window_start", help="first analysis day (ISO)")
    sub.add_argument("--window-end", dest="window_end", help="last analysis day (ISO)")
    sub.add_argument("--roas", help="directory of monthly ROA CSV snapshots")
    sub.add_argument("--as-rel", dest="as_rel", help="directory of AS relationship snapshots")
    sub.add_argument("--as2org", help="directory of AS-to-organization snapshots")
    sub.add_argument("--asdb", help="directory of ASdb snapshots")
    sub.add_argument("--hypergiants", help="hypergiant JSON file")
    sub.add_argument("--anycast", help="anycast prefix list file")
    sub.add_argument("--bogons", help="bogon tables config (default: packaged snapshot)")
    sub.add_argument("--day", help="report day for single-day figures (default window end)")


def _parse_date(parser: argparse.ArgumentParser, text: str | None) -> date | None:
    if text is None:
        return None
    try:
        return date.fromisoformat(text)
    except ValueError:
        parser.error(f"bad date: {text!r}")


def _config_from_args(parser: argparse.ArgumentParser, args: argparse.Namespace) -> RunConfig:
    path = getattr(args, "config", None) or os.environ.get("MOASSCOPE_CONFIG")
    try:
        cfg = RunConfig.from_file(path) if path else RunConfig()
    except (OSError, ValueError) as exc:
        parser.error(f"cannot read config {path}: {exc}")
    overrides: dict = {}

    def take(name: str, attr: str | None = None, conv=None):
        value = getattr(args, attr or name, None)
        if value is not None:
            overrides[name] = conv(value) if conv else value

    take("ribs_dir", "ribs", Path)
    take("out_dir", "out", Path)
    take("roas_dir", "roas", Path)
    take("as_rel_dir", "as_rel", Path)
    take("as2org_dir", "as2org", Path)
    take("asdb_dir", "asdb", Path)
    take("hypergiants_file", "hypergiants", Path)
    take("anycast_file", "anycast", Path)
    take("bogons_file", "bogons", Path)
    take("window_start", conv=lambda t: _parse_date(parser, t))
    take("window_end", conv=lambda t: _parse_date(parser, t))
    take("report_day", "day", conv=lambda t: _parse_date(parser, t))
    take("slots_per_day")
    take("nominal_times", conv=lambda t: tuple(p.strip() for p in t.split(",")))
    take("sensitivity")
    take("threshold_days")
    take("cap_days")
    take("kneedle_sensitivity")
    take("anycast_match")
    take("workers")
    return cfg.merged(**overrides)


def _require(parser: argparse.ArgumentParser, cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        parser.error("missing required settings: " + ", ".join(missing))


def _window_from_store(parser: argparse.ArgumentParser, cfg: RunConfig) -> RunConfig:
    """Stage commands fall back to the observation store's day range."""
    if cfg.window_start is not None and cfg.window_end is not None:
        if cfg.window_end < cfg.window_start:
            parser.error(f"empty window: {cfg.window_start}..{cfg.window_end}")
        return cfg
    store = load_observation_store(cfg.out_dir)
    if not store:
        parser.error(f"no observation store under {cfg.out_dir}; run detect first")
    days = sorted(key.day for key in store)
    return cfg.merged(window_start=days[0], window_end=days[-1])


def cmd_convert(parser, args) -> int:
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    status = 0
    for source in args.files:
        try:
            records, stats = parse_mrt_rib(source, collector=args.collector)
        except (MrtDecodeError, IngestError, OSError) as exc:
            print(f"error: {source}: {exc}", file=sys.stderr)
            status = 1
            continue
        lines = [render_normalized(r) for r in records]
        if out_dir is None:
            for line in lines:
                print(line)
        else:
            name = Path(source).name
            for ext in (".gz", ".bz2", ".mrt", ".dump"):
                if name.endswith(ext):
                    name = name[: -len(ext)]
            target = out_dir / (name + ".jsonl")
            with open(target, "wt", encoding="utf-8", newline="\n") as fh:
                for line in lines:
                    fh.write(line + "\n")
        print(
            f"{source}: emitted={stats.emitted} as_set_origins={stats.as_set_origins} "
            f"malformed={stats.malformed}",
            file=sys.stderr,
        )
    return status


def cmd_synth(parser, args) -> int:
    scenario = Scenario.load(args.scenario)
    problems = validate_scenario(scenario)
    if problems:
        for p in problems:
            print(f"scenario error: {p}", file=sys.stderr)
        return 2
    manifest = generate(scenario, args.out)
    print(
        f"wrote {manifest['files']} files, {manifest['records']} records, "
        f"{len(manifest['prefixes'])} MOAS prefixes under {args.out}"
    )
    return 0


def cmd_detect(parser, args) -> int:
    cfg = _config_from_args(parser, args)
    _require(parser, cfg, "ribs_dir", "out_dir", "window_start", "window_end")
    problems = cfg.validate()
    if problems:
        parser.error("; ".join(problems))
    keys = stage_detect(cfg)
    print(f"{len(keys)} snapshots -> {cfg.out_dir}/observations")
    return 0


def cmd_lifetime(parser, args) -> int:
    cfg = _config_from_args(parser, args)
    _require(parser, cfg, "out_dir")
    cfg = _window_from_store(parser, cfg)
    timelines = build_timelines_from_store(cfg)
    if not timelines:
        print("no MOAS timelines in the observation store", file=sys.stderr)
        return 1
    results = stage_lifetime(cfg, timelines)
    longlived = longlived_prefixes(results[cfg.sensitivity])
    print(
        f"{len(timelines)} MOAS prefixes, {len(longlived)} long-lived "
        f"(threshold {cfg.threshold_days} d at sensitivity {cfg.sensitivity})"
    )
    return 0


def _read_raw_curve(path: str) -> tuple[list[float], list[float]]:
    xs: list[float] = []
    ys: list[float] = []
    with open(path, "rt", encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if len(row) < 2:
                continue
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                continue  # header
            xs.append(x)
            ys.append(y)
    return xs, ys


def cmd_knee(parser, args) -> int:
    config = lifetime_mod.KneeConfig(
        cap_days=args.cap_days if args.cap_days else lifetime_mod.DEFAULT_CAP_DAYS,
        kneedle_sensitivity=args.kneedle_sensitivity
        if args.kneedle_sensitivity
        else lifetime_mod.DEFAULT_KNEEDLE_SENSITIVITY,
    )
    try:
        if args.raw_curve:
            xs, ys = _read_raw_curve(args.table)
            knee = lifetime_mod.kneedle_knee(xs, ys, config)
            print(f"knee={knee:g}")
            return 0
        with open(args.table, "rt", encoding="utf-8", newline="") as fh:
            values = [int(row["max_lifetime_days"]) for row in csv.DictReader(fh)]
        if not values:
            print("no knee", file=sys.stderr)
            return 1
        knee, short = lifetime_mod.knee_from_lifetimes(values, config)
        print(f"knee_days={knee:g}")
        print(f"short_lived_fraction={short:.6f}")
        print(f"long_lived_fraction={1 - short:.6f}")
        return 0
    except lifetime_mod.NoKneeError:
        print("no knee", file=sys.stderr)
        return 1


def cmd_rpki(parser, args) -> int:
    cfg = _config_from_args(parser, args)
    _require(parser, cfg, "out_dir", "roas_dir")
    cfg = _window_from_store(parser, cfg)
    timelines = build_timelines_from_store(cfg)
    results = stage_lifetime(cfg, timelines) if timelines else {cfg.sensitivity: {}}
    longlived = longlived_prefixes(results[cfg.sensitivity])
    classes = stage_rpki(cfg, timelines, longlived)
    print(f"{len(classes)} prefix-months classified -> {cfg.out_dir}/rov")
    return 0


def cmd_enrich(parser, args) -> int:
    cfg = _config_from_args(parser, args)
    _require(parser, cfg, "out_dir")
    cfg = _window_from_store(parser, cfg)
    timelines = build_timelines_from_store(cfg)
    if not timelines:
        print("no MOAS timelines in the observation store", file=sys.stderr)
        return 1
    results = stage_lifetime(cfg, timelines)
    configured = results[cfg.sensitivity]
    longlived = longlived_prefixes(configured)
    classes = stage_rpki(cfg, timelines, longlived)
    profiles = stage_profiles(cfg, timelines, configured, longlived, classes)
    print(f"{len(profiles)} profile rows -> {cfg.out_dir}/profiles/profiles.csv")
    return 0


def cmd_report(parser, args) -> int:
    cfg = _config_from_args(parser, args)
    _require(parser, cfg, "out_dir")
    cfg = _window_from_store(parser, cfg)
    day = cfg.report_day or cfg.window_end
    wanted = args.figures.split(",") if args.figures else list(reports.FIGURE_IDS)
    for figure_id in wanted:
        try:
            for path in reports.emit_figure_data(cfg, figure_id.strip(), day):
                print(f"wrote {path}")
        except ValueError as exc:
            parser.error(str(exc))
    ok, checks = reports.run_checks(cfg)
    for name in sorted(checks):
        state = "ok" if checks[name]["ok"] else "FAIL"
        print(f"check {name}: {state} ({checks[name]['detail']})")
    return 0 if ok else 1


def cmd_run(parser, args) -> int:
    cfg = _config_from_args(parser, args)
    _require(parser, cfg, "ribs_dir", "out_dir", "window_start", "window_end")
    problems = cfg.validate()
    if problems:
        parser.error("; ".join(problems))
    summary = run_pipeline(cfg)
    print(
        f"snapshots={summary['snapshots']} moas={summary['moas_prefixes']} "
        f"longlived={summary['longlived_prefixes']} profiles={summary['profile_rows']} "
        f"checks_ok={summary['checks_ok']}"
    )
    return 0 if summary["checks_ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moasscope",
        description="Detect and characterize long-lived MOAS prefixes from BGP RIB snapshots.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    convert = subs.add_parser("convert", help="decode MRT RIB files to normalized JSONL")
    convert.add_argument("files", nargs="+", help="MRT files (.gz/.bz2 sniffed)")
    convert.add_argument("--collector", required=True)
    convert.add_argument("--out", help="output directory (default: stdout)")
    convert.set_defaults(func=cmd_convert)

    synth = subs.add_parser("synth", help="generate a synthetic dataset from a scenario")
    synth.add_argument("scenario", help="scenario JSON file")
    synth.add_argument("--out", required=True, help="output directory")
    synth.set_defaults(func=cmd_synth)

    for name, func, helptext in (
        ("detect", cmd_detect, "build the per-snapshot MOAS observation store"),
        ("lifetime", cmd_lifetime, "compute lifetimes, observability, and the knee"),
        ("rpki", cmd_rpki, "classify ROV states of long-lived MOAS prefixes"),
        ("enrich", cmd_enrich, "emit enriched per-day MOAS profiles"),
        ("report", cmd_report, "emit figure tables and run reconciliation checks"),
        ("run", cmd_run, "run the full pipeline end to end"),
    ):
        sub = subs.add_parser(name, help=helptext)
        _add_common_flags(sub)
        _add_input_flags(sub)
        if name == "report":
            sub.add_argument("--figures", help="comma-separated figure ids (default: all)")
        sub.set_defaults(func=func)

    knee = subs.add_parser("knee", help="knee of a lifetime CSV (or a raw x,y curve)")
    knee.add_argument("table", help="lifetime CSV from the lifetime stage")
    knee.add_argument("--raw-curve", action="store_true", dest="raw_curve",
                      help="treat the input as a raw x,y curve")
    knee.add_argument("--cap-days", type=int, dest="cap_days")
    knee.add_argument("--kneedle-sensitivity", type=float, dest="kneedle_sensitivity")
    knee.set_defaults(func=cmd_knee)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IngestError, MrtDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
