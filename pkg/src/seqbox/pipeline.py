"""The shared overview engine: filter, select, order, align, aggregate, lay out.

Both the CLI and the HTTP service call into this module so that identical
inputs and parameters always produce byte-identical layout documents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Mapping, Optional, Sequence, Union

from .alignment import AnchorSet, ColumnGrid, build_column_grid, match_anchors
from .ingest import EventLog, format_timestamp
from .layout import LayoutConfig, OverviewLayout, compute_layout
from .sequences import (
    CoverageSelection,
    EventSequence,
    UniqueSequence,
    build_sequences,
    extract_unique_sequences,
    select_by_coverage,
)
from .similarity import complete_link_cluster, distance_matrix, leaf_ordering
from .timestats import (
    WEEKDAY_LABELS,
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
    color_labels,
    full_cycle_spec,
)

DEFAULT_COVERAGE = 0.8
DEFAULT_MIN_FREQUENCY = 1
DEFAULT_AXIS = ScaleKind.HOUR_OF_DAY
DEFAULT_COLOR = ScaleKind.DAY_OF_WEEK
DEFAULT_LOD = LodPreset.DETAILED_QUARTILES

ScaleSetting = Union[TimeScaleSpec, ScaleKind]


@dataclass(frozen=True)
class OverviewParams:
    """Everything that shapes one overview computation.

    Scales may be given as a bare ScaleKind, which resolves to the kind's
    full cyclic span, or, for the absolute kind, to the filtered data's time
    extent. LOD cell keys are (document row, column) of the current view.
    """

    coverage: float = DEFAULT_COVERAGE
    min_frequency: int = DEFAULT_MIN_FREQUENCY
    anchors: tuple[str, ...] = ()
    filter: FilterSpec = FilterSpec()
    axis: ScaleSetting = DEFAULT_AXIS
    color: Optional[ScaleSetting] = DEFAULT_COLOR
    stats: StatsConfig = StatsConfig()
    default_lod: LodPreset = DEFAULT_LOD
    lod_cells: Mapping[tuple[int, int], LodPreset] = field(default_factory=dict)
    lod_event_types: Mapping[str, LodPreset] = field(default_factory=dict)
    breakdowns: frozenset[tuple[str, ...]] = frozenset()
    layout: LayoutConfig = LayoutConfig()


@dataclass(frozen=True)
class ModelRow:
    signature: tuple[str, ...]
    frequency: int
    breakdown_label: Optional[str]
    members: tuple[EventSequence, ...]
    boxes: tuple[EventBox, ...]


@dataclass(frozen=True)
class OverviewModel:
    """Intermediate result: everything the layout and the detail endpoint need.

    `rows` are indexed by grid row; `grid.row_order` gives document order.
    """

    rows: tuple[ModelRow, ...]
    grid: ColumnGrid
    axis: TimeScaleSpec
    color: Optional[TimeScaleSpec]
    color_legend: tuple[str, ...]
    totals: dict
    selection: Optional[CoverageSelection]

    def document_cell(self, doc_row: int, column: int) -> Optional[tuple[ModelRow, int]]:
        """Resolve (document row, column) to (model row, signature position)."""
        if not 0 <= doc_row < len(self.grid.row_order):
            return None
        grid_row = self.grid.row_order[doc_row]
        row = self.rows[grid_row]
        for position, placed_column in enumerate(self.grid.placements[grid_row]):
            if placed_column == column:
                return row, position
        return None


def resolve_scale(
    setting: ScaleSetting, extent: tuple[datetime, datetime]
) -> TimeScaleSpec:
    if isinstance(setting, TimeScaleSpec):
        return setting
    if setting is ScaleKind.ABSOLUTE:
        lo, hi = extent
        if hi <= lo:
            hi = lo + timedelta(milliseconds=1)
        return TimeScaleSpec.absolute(lo, hi)
    return full_cycle_spec(setting)


def _filtered_extent(
    sequences: Sequence[EventSequence], fallback: tuple[datetime, datetime]
) -> tuple[datetime, datetime]:
    starts = [e.start for s in sequences for e in s.events]
    ends = [e.end if e.end is not None else e.start for s in sequences for e in s.events]
    if not starts:
        return fallback
    return (min(starts), max(ends))


def build_model(log: EventLog, params: OverviewParams) -> OverviewModel:
    """Run pipeline steps 1-3 plus the event-box statistics."""
    sequences = build_sequences(log)
    filtered = apply_filter(sequences, params.filter)
    uniques = extract_unique_sequences(filtered) if filtered else []
    selection = (
        select_by_coverage(uniques, params.coverage, params.min_frequency)
        if uniques
        else None
    )
    extent = _filtered_extent(filtered, log.time_extent)
    axis = resolve_scale(params.axis, extent)
    color = resolve_scale(params.color, extent) if params.color is not None else None

    event_types = {e.event_type for s in filtered for e in s.events}
    selected = selection.selected if selection else ()
    totals = {
        "n_event_types": len(event_types),
        "n_sequences": len(filtered),
        "n_unique_sequences": len(uniques),
        "n_selected": len(selected),
        "coverage_ratio": selection.coverage_ratio if selection else 0.0,
        "time_extent": (
            [format_timestamp(extent[0]), format_timestamp(extent[1])]
            if filtered
            else None
        ),
    }
    legend = color_labels(color)

    if not selected:
        return OverviewModel(
            rows=(),
            grid=ColumnGrid((), 0, (), ()),
            axis=axis,
            color=color,
            color_legend=legend,
            totals=totals,
            selection=selection,
        )

    # Expand broken-down parents into weekday sub-rows; a parent's sub-rows
    # stay consecutive wherever the clustering order places the parent.
    expanded: list[tuple[UniqueSequence, Optional[str]]] = []
    blocks: list[list[int]] = []
    for unique in selected:
        block: list[int] = []
        if unique.signature in params.breakdowns:
            for weekday, sub in breakdown_row(unique):
                block.append(len(expanded))
                expanded.append((sub, WEEKDAY_LABELS[weekday]))
        else:
            block.append(len(expanded))
            expanded.append((unique, None))
        blocks.append(block)

    parent_signatures = [u.signature for u in selected]
    dendrogram = complete_link_cluster(distance_matrix(parent_signatures))
    parent_order = leaf_ordering(dendrogram, [u.frequency for u in selected])
    base_order = [row for parent in parent_order for row in blocks[parent]]

    anchor_set = AnchorSet(params.anchors)
    signatures = [u.signature for u, _label in expanded]
    matches = [
        match_anchors(signature, anchor_set, row=i)
        for i, signature in enumerate(signatures)
    ]
    grid = build_column_grid(signatures, matches, anchor_set, base_order)

    rows = []
    for unique, label in expanded:
        boxes = tuple(
            build_event_box(
                event_type,
                [(m.identifier, m.events[p]) for m in unique.members],
                axis,
                color,
                params.stats,
            )
            for p, event_type in enumerate(unique.signature)
        )
        rows.append(
            ModelRow(
                signature=unique.signature,
                frequency=unique.frequency,
                breakdown_label=label,
                members=unique.members,
                boxes=boxes,
            )
        )

    return OverviewModel(
        rows=tuple(rows),
        grid=grid,
        axis=axis,
        color=color,
        color_legend=legend,
        totals=totals,
        selection=selection,
    )


def _resolve_lod(
    params: OverviewParams, doc_row: int, column: int, event_type: str
) -> DetailLevel:
    preset = params.lod_cells.get((doc_row, column))
    if preset is None:
        preset = params.lod_event_types.get(event_type)
    if preset is None:
        preset = params.default_lod
    return DetailLevel(LodPreset(preset))


def layout_from_model(model: OverviewModel, params: OverviewParams) -> OverviewLayout:
    if not model.rows:
        return OverviewLayout(
            rows=(),
            columns=(),
            axis=model.axis,
            color_legend=model.color_legend,
            totals=model.totals,
        )
    doc_position = {grid_row: dr for dr, grid_row in enumerate(model.grid.row_order)}
    boxes = [row.boxes for row in model.rows]
    lods = [
        tuple(
            _resolve_lod(
                params,
                doc_position[r],
                model.grid.placements[r][p],
                row.boxes[p].event_type,
            )
            for p in range(len(row.boxes))
        )
        for r, row in enumerate(model.rows)
    ]
    row_meta = [
        (row.signature, row.frequency, row.breakdown_label) for row in model.rows
    ]
    return compute_layout(
        model.grid,
        boxes,
        lods,
        params.layout,
        axis=model.axis,
        color_legend=model.color_legend,
        totals=model.totals,
        row_meta=row_meta,
    )


def build_overview(log: EventLog, params: OverviewParams) -> OverviewLayout:
    """The full four-step pipeline from parsed log to layout document."""
    return layout_from_model(build_model(log, params), params)
