"""seqbox: sequential and time-pattern analytics for time-stamped event logs.

Parses event logs, extracts unique sequences with frequencies, orders them by
edit-distance similarity, aligns them on user-chosen anchor events, and
aggregates duration and time-of-occurrence statistics into boxplot-style
event boxes, served as deterministic layout documents over HTTP or files.
"""

from .alignment import AnchorSet, ColumnGrid, build_column_grid, match_anchors
from .ingest import (
    EmptyLog,
    EventLog,
    EventRecord,
    IngestError,
    IngestFormat,
    MalformedRow,
    NegativeDuration,
    duration_of,
    parse_event_log,
    write_csv,
)
from .layout import LayoutConfig, OverviewLayout, compute_layout, layout_to_json, render_svg
from .pipeline import OverviewParams, build_model, build_overview, layout_from_model
from .sequences import (
    CoverageSelection,
    EventSequence,
    UniqueSequence,
    build_sequences,
    extract_unique_sequences,
    select_by_coverage,
)
from .similarity import (
    Dendrogram,
    DistanceMatrix,
    complete_link_cluster,
    distance_matrix,
    edit_distance,
    leaf_ordering,
)
from .timestats import (
    DataPoint,
    DetailLevel,
    EventBox,
    FilterSpec,
    LodPreset,
    ScaleKind,
    StatsConfig,
    TimeScaleSpec,
    apply_filter,
    breakdown_row,
    build_event_box,
    classify_outliers,
    color_key_of,
    project_occurrence,
    quartiles,
)

__version__ = "0.1.0"
