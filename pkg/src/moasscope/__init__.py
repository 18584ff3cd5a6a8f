"""moasscope: long-lived MOAS prefix detection and characterization.

A prefix announced by two or more origin ASes at the same time is a
MOAS (multiple-origin AS) prefix.  This package decodes multi-collector
BGP RIB snapshots, filters route artifacts, detects MOAS prefixes,
computes gap-tolerant lifetimes with a knee-based short/long split, and
enriches the long-lived population with RPKI validation state, CIDR
groups, visibility, relationship, business, hypergiant, and anycast
attributes.  See the demos/ scripts for narrative walkthroughs.
"""

from .records import (
    AlignmentConfig,
    AsPath,
    IpPrefix,
    RibRecord,
    SnapshotKey,
    align_snapshot,
)
from .ingest import (
    IngestError,
    IngestStats,
    parse_mrt_rib,
    parse_normalized,
    parse_rib_file,
    render_normalized,
)
from .mrt import MrtDecodeError
from .filters import (
    BogonTables,
    FilterVerdict,
    classify_prefix,
    filter_records,
    is_reserved_asn,
)
from .moas import (
    MoasObservation,
    MoasTimeline,
    OriginView,
    build_origin_views,
    build_timelines,
    detect_moas,
)
from .lifetime import (
    KneeConfig,
    LifetimeResult,
    NoKneeError,
    classify_longevity,
    kneedle_knee,
    knee_from_lifetimes,
    lifetime_cdf,
    max_lifetime,
    merge_day_runs,
    observability,
    segments,
)
from .rpki import (
    RoaRecord,
    RoaSet,
    classify_moas_rov,
    load_roas,
    validate,
)
from .enrich import (
    BusinessPair,
    MoasProfile,
    business_pair,
    build_profile,
    cidr_group,
    classify_relationship,
    origin_stats,
    tag_hypergiant_and_anycast,
    visibility_bucket,
    visibility_stats,
)
from .synth import EventSpec, Scenario, generate, validate_scenario
from .pipeline import RunConfig, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "AlignmentConfig",
    "AsPath",
    "BogonTables",
    "BusinessPair",
    "EventSpec",
    "FilterVerdict",
    "IngestError",
    "IngestStats",
    "IpPrefix",
    "KneeConfig",
    "LifetimeResult",
    "MoasObservation",
    "MoasProfile",
    "MoasTimeline",
    "MrtDecodeError",
    "NoKneeError",
    "OriginView",
    "RibRecord",
    "RoaRecord",
    "RoaSet",
    "RunConfig",
    "Scenario",
    "SnapshotKey",
    "align_snapshot",
    "build_origin_views",
    "build_profile",
    "build_timelines",
    "business_pair",
    "cidr_group",
    "classify_longevity",
    "classify_moas_rov",
    "classify_prefix",
    "classify_relationship",
    "detect_moas",
    "filter_records",
    "generate",
    "is_reserved_asn",
    "kneedle_knee",
    "knee_from_lifetimes",
    "lifetime_cdf",
    "load_roas",
    "max_lifetime",
    "merge_day_runs",
    "observability",
    "origin_stats",
    "parse_mrt_rib",
    "parse_normalized",
    "parse_rib_file",
    "render_normalized",
    "run_pipeline",
    "segments",
    "tag_hypergiant_and_anycast",
    "validate",
    "validate_scenario",
    "visibility_bucket",
    "visibility_stats",
]
