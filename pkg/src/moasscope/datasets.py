"""Loaders for the external datasets used to enrich MOAS prefixes.

Formats:
  - AS relationships: ``asn|asn|rel`` with rel -1 (provider-customer)
    or 0 (peer-to-peer); '#' comments.
  - AS-to-organization: either the pipe-delimited two-section convention
    announced by ``# format:`` headers, or JSONL records with a ``type``
    of Organization/ASN, joined on the organization id.
  - ASdb: CSV of ``asn,layer1,layer2,layer1,layer2,...`` repeated
    category columns.
  - Hypergiants: JSON object mapping organization name to ASN list.
  - Anycast prefixes: one prefix per line.

Release cadences differ per dataset, so a DatedCollection picks, for an
analysis day, the newest snapshot file dated at or before that day.
"""

from __future__ import annotations

import csv
import gzip
import json
import re
from bisect import bisect_right
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Callable, Iterable

from .records import IpPrefix, prefix_mask

P2C = -1
P2P = 0


def _open_text(path: str | Path):
    if str(path).endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "rt", encoding="utf-8")


class AsRelDb:
    """CAIDA-style inter-AS relationship inferences."""

    def __init__(self, pair2rel: dict[tuple[int, int], int]):
        self._pair2rel = pair2rel
        self.skipped = 0

    @classmethod
    def load(cls, path: str | Path) -> "AsRelDb":
        pair2rel: dict[tuple[int, int], int] = {}
        skipped = 0
        with _open_text(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                fields = line.split("|")
                try:
                    a, b, rel = int(fields[0]), int(fields[1]), int(fields[2])
                    if rel not in (P2C, P2P):
                        raise ValueError(rel)
                except (ValueError, IndexError):
                    skipped += 1
                    continue
                pair2rel[(a, b)] = rel
        db = cls(pair2rel)
        db.skipped = skipped
        return db

    def get(self, a: int, b: int) -> int | None:
        """Relationship between a and b, direction-insensitive for -1."""
        rel = self._pair2rel.get((a, b))
        if rel is None:
            rel = self._pair2rel.get((b, a))
        return rel

    def __len__(self) -> int:
        return len(self._pair2rel)


class As2OrgDb:
    """AS-to-organization mapping (asn -> org id -> name)."""

    def __init__(self, asn_to_org: dict[int, str], org_names: dict[str, str]):
        self.asn_to_org = asn_to_org
        self.org_names = org_names

    @classmethod
    def load(cls, path: str | Path) -> "As2OrgDb":
        asn_to_org: dict[int, str] = {}
        org_names: dict[str, str] = {}
        with _open_text(path) as fh:
            lines = fh.read().splitlines()
        section = None  # "org" | "aut" for the pipe format
        for line in lines:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                low = line.lower()
                if "format:org_id" in low:
                    section = "org"
                elif "format:aut" in low:
                    section = "aut"
                continue
            if line.startswith("{"):
                try:
                    obj = json.loads(line)
                except ValueError:
                    continue
                kind = str(obj.get("type", "")).lower()
                if kind == "organization":
                    org_names[str(obj.get("organizationId", ""))] = str(obj.get("name", ""))
                elif kind == "asn":
                    try:
                        asn_to_org[int(obj["asn"])] = str(obj.get("organizationId", ""))
                    except (KeyError, ValueError):
                        continue
                continue
            fields = line.split("|")
            if section == "org" and len(fields) >= 3:
                org_names[fields[0]] = fields[2]
            elif section == "aut" and len(fields) >= 4:
                try:
                    asn_to_org[int(fields[0])] = fields[3]
                except ValueError:
                    continue
        return cls(asn_to_org, org_names)

    def org_id(self, asn: int) -> str | None:
        return self.asn_to_org.get(asn)

    def org_name(self, asn: int) -> str | None:
        org = self.asn_to_org.get(asn)
        if org is None:
            return None
        return self.org_names.get(org, org)

    def same_org(self, a: int, b: int) -> bool:
        """Same org id, or identical non-empty registered names."""
        org_a, org_b = self.org_id(a), self.org_id(b)
        if org_a is None or org_b is None:
            return False
        if org_a == org_b:
            return True
        name_a, name_b = self.org_names.get(org_a, ""), self.org_names.get(org_b, "")
        return bool(name_a) and name_a == name_b


class AsdbDb:
    """ASdb business categories: asn -> distinct layer-1 categories."""

    def __init__(self, categories: dict[int, tuple[str, ...]]):
        self._categories = categories

    @classmethod
    def load(cls, path: str | Path) -> "AsdbDb":
        categories: dict[int, tuple[str, ...]] = {}
        with open(path, "rt", encoding="utf-8", newline="") as fh:
            for row in csv.reader(fh):
                if not row:
                    continue
                asn_text = row[0].strip()
                if asn_text.upper().startswith("AS"):
                    asn_text = asn_text[2:]
                if not asn_text.isdigit():
                    continue  # header or junk
                layer1: list[str] = []
                for cell in row[1::2]:
                    cat = cell.strip()
                    if cat and cat not in layer1:
                        layer1.append(cat)
                categories[int(asn_text)] = tuple(layer1)
        return cls(categories)

    def layer1(self, asn: int) -> tuple[str, ...] | None:
        return self._categories.get(asn)


class HypergiantDb:
    """Hypergiant organizations and the ASNs they operate."""

    def __init__(self, org_to_asns: dict[str, frozenset[int]]):
        self.org_to_asns = org_to_asns
        self._asn_to_orgs: dict[int, list[str]] = {}
        for org in sorted(org_to_asns):
            for asn in org_to_asns[org]:
                self._asn_to_orgs.setdefault(asn, []).append(org)

    @classmethod
    def load(cls, path: str | Path) -> "HypergiantDb":
        with open(path, "rt", encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls({str(org): frozenset(int(a) for a in asns) for org, asns in raw.items()})

    def orgs_for(self, origins: Iterable[int]) -> tuple[str, ...]:
        orgs: set[str] = set()
        for asn in origins:
            orgs.update(self._asn_to_orgs.get(asn, ()))
        return tuple(sorted(orgs))


class AnycastList:
    """Known anycast prefixes; exact matching by default, containment optional."""

    def __init__(self, prefixes: Iterable[IpPrefix]):
        self._exact = frozenset(prefixes)
        self._lengths = {
            4: sorted({p.length for p in self._exact if p.family == 4}),
            6: sorted({p.length for p in self._exact if p.family == 6}),
        }
        self._by_len = {
            (p.family, p.length, p.address): True for p in self._exact
        }

    @classmethod
    def load(cls, path: str | Path) -> "AnycastList":
        prefixes = []
        with open(path, "rt", encoding="utf-8") as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if line:
                    prefixes.append(IpPrefix.parse(line))
        return cls(prefixes)

    def __len__(self) -> int:
        return len(self._exact)

    def matches(self, prefix: IpPrefix, mode: str = "exact") -> bool:
        if mode == "exact":
            return prefix in self._exact
        if mode == "contains":
            for length in self._lengths[prefix.family]:
                if length > prefix.length:
                    break
                masked = prefix.address & prefix_mask(prefix.bits, length)
                if (prefix.family, length, masked) in self._by_len:
                    return True
            return False
        raise ValueError(f"unknown anycast match mode: {mode}")


_DATE_PATTERNS = (
    re.compile(r"(\d{4})-(\d{2})-(\d{2})"),
    re.compile(r"(\d{4})(\d{2})(\d{2})"),
    re.compile(r"(\d{4})-(\d{2})"),
    re.compile(r"(\d{4})(\d{2})"),
)


def date_from_filename(name: str) -> date | None:
    """Extract the snapshot date embedded in a dataset filename."""
    for pattern in _DATE_PATTERNS:
        m = pattern.search(name)
        if not m:
            continue
        groups = [int(g) for g in m.groups()]
        try:
            if len(groups) == 3:
                return date(*groups)
            return date(groups[0], groups[1], 1)
        except ValueError:
            continue
    return None


@dataclass
class DatedCollection:
    """Snapshot files in one directory, selectable by analysis day.

    ``latest_at(day)`` returns the newest file dated at or before the
    day, which matches the quarterly/monthly release cadence of these
    datasets.  Loaded snapshots are cached per path.
    """

    directory: Path
    loader: Callable[[Path], object]

    def __post_init__(self):
        self.directory = Path(self.directory)
        entries = []
        if self.directory.is_dir():
            for p in sorted(self.directory.iterdir()):
                if not p.is_file():
                    continue
                d = date_from_filename(p.name)
                if d is not None:
                    entries.append((d, p))
        entries.sort()
        self._dates = [d for d, _ in entries]
        self._paths = [p for _, p in entries]
        self._cache: dict[Path, object] = {}

    def __len__(self) -> int:
        return len(self._paths)

    def path_at(self, day: date) -> Path | None:
        i = bisect_right(self._dates, day) - 1
        return self._paths[i] if i >= 0 else None

    def latest_at(self, day: date):
        path = self.path_at(day)
        if path is None:
            return None
        if path not in self._cache:
            self._cache[path] = self.loader(path)
        return self._cache[path]
