"""Analytic attributes for long-lived MOAS prefixes.

Covers the CIDR size group, per-PO visibility buckets and per-prefix
min/max/difference visibility, origin-set statistics, the inter-origin
BGP relationship class, the business-category pair, hypergiant
membership, and the anycast flag.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from datetime import date
from typing import Iterable, Mapping

from .datasets import AnycastList, As2OrgDb, AsRelDb, AsdbDb, HypergiantDb, P2C, P2P
from .lifetime import LifetimeResult
from .moas import MoasObservation
from .records import IpPrefix

V4_CIDR_GROUPS = ("/8-/20", "/21-/23", "/24", "/25-/32")
V6_CIDR_GROUPS = ("/8-/31", "/32-/47", "/48", "/49-/128")

VISIBILITY_BUCKETS = ("<4", "4-9", "10-50", "51-100", ">100")

SIBLINGS = "Siblings"
C2P_P2C = "C2P_P2C"
PEERING = "Peering"
NO_RELATION = "NoRelationDetected"
NOT_APPLICABLE = "NotApplicable"  # MOAS with more than two origins

REL_CLASSES = (SIBLINGS, C2P_P2C, PEERING, NO_RELATION)

BUSINESS_MATCHED = "Matched"
BUSINESS_MULTI = "MultiCategory"
BUSINESS_UNMATCHED = "Unmatched"


def cidr_group(prefix: IpPrefix) -> str:
    """CIDR size group label; total over every valid (family, length)."""
    if prefix.family == 4:
        if prefix.length <= 20:
            return V4_CIDR_GROUPS[0]
        if prefix.length <= 23:
            return V4_CIDR_GROUPS[1]
        if prefix.length == 24:
            return V4_CIDR_GROUPS[2]
        return V4_CIDR_GROUPS[3]
    if prefix.length <= 31:
        return V6_CIDR_GROUPS[0]
    if prefix.length <= 47:
        return V6_CIDR_GROUPS[1]
    if prefix.length == 48:
        return V6_CIDR_GROUPS[2]
    return V6_CIDR_GROUPS[3]


def visibility_bucket(count: int) -> str:
    """Bucket a positive peer count; the bands partition all counts >= 1."""
    if count < 1:
        raise ValueError("visibility counts are >= 1")
    if count < 4:
        return VISIBILITY_BUCKETS[0]
    if count <= 9:
        return VISIBILITY_BUCKETS[1]
    if count <= 50:
        return VISIBILITY_BUCKETS[2]
    if count <= 100:
        return VISIBILITY_BUCKETS[3]
    return VISIBILITY_BUCKETS[4]


@dataclass(frozen=True)
class VisibilityStats:
    min: int
    max: int
    diff: int
    buckets: Mapping[int, str]  # origin -> bucket label


def visibility_stats(observation: MoasObservation) -> VisibilityStats:
    """Min/max/difference of per-origin peer counts, plus per-PO buckets."""
    counts = [observation.visibility[a] for a in observation.origin_set]
    if len(counts) < 2:
        raise ValueError("visibility stats need at least two origins")
    lo, hi = min(counts), max(counts)
    return VisibilityStats(
        min=lo,
        max=hi,
        diff=hi - lo,
        buckets={a: visibility_bucket(observation.visibility[a]) for a in observation.origin_set},
    )


def origin_stats(
    observations: Iterable[MoasObservation],
) -> tuple[Counter, Counter]:
    """Histograms for one day: origins per prefix, and MOAS prefixes per origin set.

    The first counter maps an origin count to the number of prefixes with
    that many origins; the second maps each (sorted) origin set to the
    number of prefixes it originates.
    """
    origins_per_prefix: Counter = Counter()
    prefixes_per_set: Counter = Counter()
    for obs in observations:
        origins_per_prefix[len(obs.origin_set)] += 1
        prefixes_per_set[obs.origin_set] += 1
    return origins_per_prefix, prefixes_per_set


def classify_relationship(
    origin_a: int,
    origin_b: int,
    rel_db: AsRelDb | None,
    org_db: As2OrgDb | None,
) -> str:
    """Inter-origin relationship with precedence Siblings > C2P/P2C > Peering.

    Origins unknown to both databases yield NoRelationDetected; that is a
    result, not an error.
    """
    if org_db is not None and org_db.same_org(origin_a, origin_b):
        return SIBLINGS
    rel = rel_db.get(origin_a, origin_b) if rel_db is not None else None
    if rel == P2C:
        return C2P_P2C
    if rel == P2P:
        return PEERING
    return NO_RELATION


@dataclass(frozen=True)
class BusinessPair:
    """Unordered layer-1 category pair of a two-origin MOAS."""

    cat_a: str | None
    cat_b: str | None
    status: str

    @property
    def key(self) -> tuple[str, str] | None:
        if self.status != BUSINESS_MATCHED:
            return None
        pair = sorted((self.cat_a or "", self.cat_b or ""))
        return (pair[0], pair[1])


def business_pair(origin_a: int, origin_b: int, asdb: AsdbDb) -> BusinessPair:
    """Matched only when both origins map to exactly one layer-1 category."""
    cats_a = asdb.layer1(origin_a)
    cats_b = asdb.layer1(origin_b)
    if not cats_a or not cats_b:
        return BusinessPair(None, None, BUSINESS_UNMATCHED)
    if len(cats_a) > 1 or len(cats_b) > 1:
        return BusinessPair(None, None, BUSINESS_MULTI)
    return BusinessPair(cats_a[0], cats_b[0], BUSINESS_MATCHED)


@dataclass(frozen=True)
class MoasProfile:
    """One long-lived MOAS prefix on one analysis day, fully enriched.

    Optional attributes are None when the corresponding input dataset was
    not provided for the run.
    """

    day: date
    prefix: IpPrefix
    origin_set: tuple[int, ...]
    max_lifetime_days: int
    observability: float
    longevity: str
    cidr_group: str
    vis_min: int
    vis_max: int
    vis_diff: int
    rov_class: str | None = None
    rel_class: str | None = None
    rel_sibling_and_c2p: bool = False
    business: BusinessPair | None = None
    hypergiant_orgs: tuple[str, ...] = ()
    anycast: bool | None = None

    @property
    def origin_count(self) -> int:
        return len(self.origin_set)


def build_profile(
    observation: MoasObservation,
    lifetime_result: LifetimeResult,
    rov_class: str | None = None,
    rel_db: AsRelDb | None = None,
    org_db: As2OrgDb | None = None,
    asdb: AsdbDb | None = None,
    hypergiants: HypergiantDb | None = None,
    anycast: AnycastList | None = None,
    anycast_match: str = "exact",
) -> MoasProfile:
    """Assemble the profile for one observation day."""
    stats = visibility_stats(observation)
    two_origins = len(observation.origin_set) == 2
    rel_class: str | None = None
    rel_both = False
    if rel_db is not None or org_db is not None:
        if two_origins:
            a, b = observation.origin_set
            rel_class = classify_relationship(a, b, rel_db, org_db)
            if rel_class == SIBLINGS and rel_db is not None:
                rel_both = rel_db.get(a, b) == P2C
        else:
            rel_class = NOT_APPLICABLE
    business: BusinessPair | None = None
    if asdb is not None and two_origins:
        a, b = observation.origin_set
        business = business_pair(a, b, asdb)
    elif asdb is not None:
        business = BusinessPair(None, None, NOT_APPLICABLE)
    return MoasProfile(
        day=observation.snapshot.day,
        prefix=observation.prefix,
        origin_set=observation.origin_set,
        max_lifetime_days=lifetime_result.max_lifetime_days,
        observability=lifetime_result.observability,
        longevity=lifetime_result.longevity,
        cidr_group=cidr_group(observation.prefix),
        vis_min=stats.min,
        vis_max=stats.max,
        vis_diff=stats.diff,
        rov_class=rov_class,
        rel_class=rel_class,
        rel_sibling_and_c2p=rel_both,
        business=business,
        hypergiant_orgs=hypergiants.orgs_for(observation.origin_set)
        if hypergiants is not None
        else (),
        anycast=anycast.matches(observation.prefix, anycast_match)
        if anycast is not None
        else None,
    )


def tag_hypergiant_and_anycast(
    profile: MoasProfile,
    hypergiants: HypergiantDb | None,
    anycast: AnycastList | None,
    anycast_match: str = "exact",
) -> MoasProfile:
    """Re-tag an existing profile with hypergiant and anycast membership."""
    return replace(
        profile,
        hypergiant_orgs=hypergiants.orgs_for(profile.origin_set)
        if hypergiants is not None
        else (),
        anycast=anycast.matches(profile.prefix, anycast_match)
        if anycast is not None
        else None,
    )
