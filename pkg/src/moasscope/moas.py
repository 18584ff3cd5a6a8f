"""Per-snapshot origin aggregation, MOAS selection, and day-indexed timelines.

MOAS is strictly exact-prefix: 10.0.0.0/8 and 10.0.0.0/9 are different
routing objects and never conflict with each other here.  Visibility is
counted in distinct route collector peers, where a peer is one BGP
session, i.e. the (collector, peer_ip, peer_asn) triple.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping

from .records import IpPrefix, RibRecord, SnapshotKey

PeerIdentity = tuple[str, str, int]


@dataclass(frozen=True)
class OriginView:
    """All origins announcing one prefix in one snapshot, with their peers."""

    prefix: IpPrefix
    snapshot: SnapshotKey
    origins: Mapping[int, frozenset[PeerIdentity]]


@dataclass(frozen=True)
class MoasObservation:
    """One prefix seen with >=2 origins in one snapshot."""

    prefix: IpPrefix
    snapshot: SnapshotKey
    origin_set: tuple[int, ...]  # sorted
    visibility: Mapping[int, int]  # origin -> distinct peer count


@dataclass
class MoasTimeline:
    """Day-indexed MOAS record for one prefix over the study window.

    A missing day means the prefix was not observed as MOAS that day,
    whether because it was single-origin or not visible at all.
    """

    prefix: IpPrefix
    window: tuple[date, date]
    days: dict[date, MoasObservation]

    def observed_days(self) -> list[date]:
        return sorted(self.days)


def build_origin_views(
    records: Iterable[RibRecord], snapshot: SnapshotKey
) -> dict[IpPrefix, OriginView]:
    """Group kept records of one snapshot by exact prefix and origin."""
    grouped: dict[IpPrefix, dict[int, set[PeerIdentity]]] = {}
    for record in records:
        origins = grouped.setdefault(record.prefix, {})
        origins.setdefault(record.origin_asn, set()).add(record.peer_identity)
    return {
        prefix: OriginView(
            prefix,
            snapshot,
            {asn: frozenset(peers) for asn, peers in origins.items()},
        )
        for prefix, origins in grouped.items()
    }


def detect_moas(views: Mapping[IpPrefix, OriginView]) -> list[MoasObservation]:
    """Exactly the views with two or more distinct origins, sorted by prefix."""
    observations = []
    for prefix in sorted(views):
        view = views[prefix]
        if len(view.origins) < 2:
            continue
        observations.append(
            MoasObservation(
                prefix=view.prefix,
                snapshot=view.snapshot,
                origin_set=tuple(sorted(view.origins)),
                visibility={asn: len(peers) for asn, peers in view.origins.items()},
            )
        )
    return observations


def _merge_day(observations: list[MoasObservation]) -> MoasObservation:
    """Collapse one day's per-slot observations (any-slot MOAS semantics).

    The merged origin set is the union over MOAS slots; per-origin
    visibility is the maximum over the slots where the origin appeared.
    """
    if len(observations) == 1:
        return observations[0]
    observations = sorted(observations, key=lambda o: o.snapshot)
    visibility: dict[int, int] = {}
    for obs in observations:
        for asn, count in obs.visibility.items():
            visibility[asn] = max(visibility.get(asn, 0), count)
    first = observations[0]
    return MoasObservation(
        prefix=first.prefix,
        snapshot=first.snapshot,
        origin_set=tuple(sorted(visibility)),
        visibility=visibility,
    )


def build_timelines(
    observations: Iterable[MoasObservation], window: tuple[date, date]
) -> dict[IpPrefix, MoasTimeline]:
    """Assemble one timeline per prefix ever observed as MOAS.

    With several snapshots per day, a day counts as MOAS if any slot is.
    """
    start, end = window
    per_day: dict[IpPrefix, dict[date, list[MoasObservation]]] = {}
    for obs in observations:
        day = obs.snapshot.day
        if not start <= day <= end:
            raise ValueError(f"observation on {day} outside window {start}..{end}")
        per_day.setdefault(obs.prefix, {}).setdefault(day, []).append(obs)
    return {
        prefix: MoasTimeline(
            prefix=prefix,
            window=window,
            days={day: _merge_day(slot_obs) for day, slot_obs in days.items()},
        )
        for prefix, days in per_day.items()
    }


def write_observations(path: str | Path, observations: Iterable[MoasObservation]) -> None:
    """Write one snapshot's observations as sorted JSONL (the observation store)."""
    rows = sorted(observations, key=lambda o: o.prefix)
    with open(path, "wt", encoding="utf-8", newline="\n") as fh:
        for obs in rows:
            fh.write(
                json.dumps(
                    {
                        "date": obs.snapshot.day.isoformat(),
                        "slot": obs.snapshot.slot,
                        "prefix": str(obs.prefix),
                        "origins": [
                            {"asn": asn, "peers": obs.visibility[asn]}
                            for asn in obs.origin_set
                        ],
                    },
                    sort_keys=True,
                    separators=(",", ":"),
                )
                + "\n"
            )


def read_observations(path: str | Path) -> list[MoasObservation]:
    observations = []
    with open(path, "rt", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            key = SnapshotKey(date.fromisoformat(obj["date"]), int(obj["slot"]))
            visibility = {int(o["asn"]): int(o["peers"]) for o in obj["origins"]}
            observations.append(
                MoasObservation(
                    prefix=IpPrefix.parse(obj["prefix"]),
                    snapshot=key,
                    origin_set=tuple(sorted(visibility)),
                    visibility=visibility,
                )
            )
    return observations
