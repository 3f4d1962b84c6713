"""Renderer-independent overview layout and its JSON / SVG serializations.

Row heights grow linearly with frequency and box widths with the duration
range Q4 - Q0, both clamped to minimums so rare rows and tight boxes stay
visible. The JSON document (schema_version 1) is the canonical wire format
consumed by the interactive UI; the SVG export exists for batch use and
golden-file comparison, and both are byte-deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from typing import Mapping, Optional, Sequence

from .alignment import ColumnGrid
from .ingest import format_timestamp
from .timestats import (
    ColorMode,
    DataPoint,
    DetailLevel,
    EventBox,
    ScaleKind,
    TimeScaleSpec,
)

SCHEMA_VERSION = 1

_MARGIN_LEFT = 70.0
_MARGIN_TOP = 60.0
_MARGIN_RIGHT = 20.0
_MARGIN_BOTTOM = 20.0


class InconsistentInput(ValueError):
    """Grid and box/LOD inputs disagree on rows or placements."""


@dataclass(frozen=True)
class LayoutConfig:
    width_per_second: float = 0.02
    min_box_width: float = 12.0
    point_box_width: float = 8.0
    min_row_height: float = 14.0
    height_per_member: float = 2.0
    gap_x: float = 6.0
    gap_y: float = 6.0

    def __post_init__(self) -> None:
        for name in (
            "width_per_second",
            "min_box_width",
            "point_box_width",
            "min_row_height",
            "height_per_member",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.gap_x < 0 or self.gap_y < 0:
            raise ValueError("gaps must be >= 0")


@dataclass(frozen=True)
class PlacedBox:
    column: int
    x: float
    width: float
    box: EventBox
    lod: DetailLevel


@dataclass(frozen=True)
class LayoutRow:
    signature: tuple[str, ...]
    frequency: int
    breakdown: Optional[str]
    y: float
    height: float
    boxes: tuple[PlacedBox, ...]


@dataclass(frozen=True)
class LayoutColumn:
    index: int
    x: float
    width: float
    anchor: Optional[str]


@dataclass(frozen=True)
class OverviewLayout:
    rows: tuple[LayoutRow, ...]
    columns: tuple[LayoutColumn, ...]
    axis: TimeScaleSpec
    color_legend: tuple[str, ...]
    totals: Mapping[str, object]

    @property
    def width(self) -> float:
        if not self.columns:
            return _MARGIN_LEFT + _MARGIN_RIGHT
        last = self.columns[-1]
        return last.x + last.width + _MARGIN_RIGHT

    @property
    def height(self) -> float:
        if not self.rows:
            return _MARGIN_TOP + _MARGIN_BOTTOM
        last = self.rows[-1]
        return last.y + last.height + _MARGIN_BOTTOM


def box_width(box: EventBox, lod: DetailLevel, cfg: LayoutConfig) -> float:
    if lod.collapsed:
        return cfg.point_box_width
    return max(cfg.min_box_width, cfg.width_per_second * (box.q[4] - box.q[0]))


def point_fraction(box: EventBox, point: DataPoint) -> float:
    """Horizontal fraction of a point within its box: (d - Q0)/(Q4 - Q0)."""
    spread = box.q[4] - box.q[0]
    if spread == 0:
        return 0.0
    return (point.duration - box.q[0]) / spread


def point_position(
    placed: PlacedBox, row: LayoutRow, point: DataPoint
) -> tuple[float, float]:
    x = placed.x + point_fraction(placed.box, point) * placed.width
    y = row.y + point.axis_pos * row.height
    return x, y


def compute_layout(
    grid: ColumnGrid,
    boxes: Sequence[Sequence[EventBox]],
    lods: Sequence[Sequence[DetailLevel]],
    cfg: LayoutConfig,
    *,
    axis: TimeScaleSpec,
    color_legend: Sequence[str] = (),
    totals: Optional[Mapping[str, object]] = None,
    row_meta: Optional[Sequence[tuple[tuple[str, ...], int, Optional[str]]]] = None,
) -> OverviewLayout:
    """Assemble the deterministic overview document from the aligned grid.

    `boxes` and `lods` are indexed like `grid.placements` (grid row, then
    signature position); `row_meta` supplies (signature, frequency,
    breakdown label) per grid row. Column width is the widest box placed in
    the column; rows stack in `grid.row_order`.
    """
    n_rows = len(grid.placements)
    if len(boxes) != n_rows or len(lods) != n_rows:
        raise InconsistentInput("boxes and lods must cover every grid row")
    for r in range(n_rows):
        if len(boxes[r]) != len(grid.placements[r]) or len(lods[r]) != len(grid.placements[r]):
            raise InconsistentInput(f"row {r}: boxes/lods disagree with placements")
    if row_meta is None:
        row_meta = [((), 1, None)] * n_rows
    elif len(row_meta) != n_rows:
        raise InconsistentInput("row_meta must cover every grid row")

    column_widths = [0.0] * grid.total_columns
    for r in range(n_rows):
        for p, column in enumerate(grid.placements[r]):
            column_widths[column] = max(
                column_widths[column], box_width(boxes[r][p], lods[r][p], cfg)
            )
    for c in range(grid.total_columns):
        if column_widths[c] == 0.0:
            column_widths[c] = cfg.min_box_width

    anchor_lookup = {column: i for i, column in enumerate(grid.anchor_columns)}
    columns: list[LayoutColumn] = []
    x = _MARGIN_LEFT
    for c in range(grid.total_columns):
        columns.append(
            LayoutColumn(
                index=c,
                x=x,
                width=column_widths[c],
                anchor=None if c not in anchor_lookup else _anchor_label(grid, boxes, c),
            )
        )
        x += column_widths[c] + cfg.gap_x

    rows: list[LayoutRow] = []
    y = _MARGIN_TOP
    for r in grid.row_order:
        signature, frequency, breakdown = row_meta[r]
        height = max(cfg.min_row_height, cfg.height_per_member * frequency)
        placed = tuple(
            PlacedBox(
                column=column,
                x=columns[column].x,
                width=box_width(boxes[r][p], lods[r][p], cfg),
                box=boxes[r][p],
                lod=lods[r][p],
            )
            for p, column in enumerate(grid.placements[r])
        )
        rows.append(
            LayoutRow(
                signature=tuple(signature),
                frequency=frequency,
                breakdown=breakdown,
                y=y,
                height=height,
                boxes=placed,
            )
        )
        y += height + cfg.gap_y

    return OverviewLayout(
        rows=tuple(rows),
        columns=tuple(columns),
        axis=axis,
        color_legend=tuple(color_legend),
        totals=dict(totals or {}),
    )


def _anchor_label(
    grid: ColumnGrid, boxes: Sequence[Sequence[EventBox]], column: int
) -> Optional[str]:
    for r in range(len(grid.placements)):
        for p, c in enumerate(grid.placements[r]):
            if c == column:
                return boxes[r][p].event_type
    return None


def _axis_to_dict(axis: TimeScaleSpec) -> dict:
    if axis.kind is ScaleKind.ABSOLUTE:
        assert isinstance(axis.t0, datetime) and isinstance(axis.tN, datetime)
        return {
            "kind": axis.kind.value,
            "t0": format_timestamp(axis.t0),
            "tN": format_timestamp(axis.tN),
        }
    return {"kind": axis.kind.value, "t0": axis.t0, "tN": axis.tN}


def to_document(layout: OverviewLayout) -> dict:
    """The layout as a plain JSON-ready dict, schema_version 1."""
    rows = []
    for r, row in enumerate(layout.rows):
        boxes = []
        for placed in row.boxes:
            points = []
            for point in placed.box.points:
                px, py = point_position(placed, row, point)
                points.append(
                    {
                        "x": px,
                        "y": py,
                        "duration": point.duration,
                        "occurrence": format_timestamp(point.occurrence),
                        "axis_pos": point.axis_pos,
                        "color_key": point.color_key,
                        "is_outlier": point.is_outlier,
                        "member": point.member_ref,
                    }
                )
            boxes.append(
                {
                    "column": placed.column,
                    "x": placed.x,
                    "width": placed.width,
                    "event_type": placed.box.event_type,
                    "count": placed.box.count,
                    "q": list(placed.box.q),
                    "fence": list(placed.box.fence),
                    "lod": placed.lod.preset.value,
                    "collapsed": placed.lod.collapsed,
                    "show_outlier_points": placed.lod.show_outlier_points,
                    "show_quartile_points": placed.lod.show_quartile_points,
                    "color_mode": placed.lod.color_mode.value,
                    "points": points,
                }
            )
        rows.append(
            {
                "row": r,
                "signature": list(row.signature),
                "frequency": row.frequency,
                "breakdown": row.breakdown,
                "y": row.y,
                "height": row.height,
                "boxes": boxes,
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "rows": rows,
        "columns": [
            {"index": c.index, "x": c.x, "width": c.width, "anchor": c.anchor}
            for c in layout.columns
        ],
        "axis": _axis_to_dict(layout.axis),
        "color_legend": list(layout.color_legend),
        "totals": dict(layout.totals),
    }


def layout_to_json(layout: OverviewLayout) -> str:
    return json.dumps(to_document(layout), separators=(",", ":"))


# Okabe-Ito colorblind-safe palette; indices cycle for scales with more
# categories than swatches. Concrete colors live here in the renderer only.
_PALETTE = (
    "#E69F00", "#56B4E9", "#009E73", "#F0E442",
    "#0072B2", "#D55E00", "#CC79A7", "#999999",
)

_QUARTILE_FILLS = ("#c6dbef", "#6baed6", "#2171b5", "#08306b")


def _svg_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def _ident(text: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in text)


def render_svg(layout: OverviewLayout) -> str:
    """Render the layout to SVG 1.1 text.

    One rect per quartile sub-box (four per non-collapsed box), one circle
    per data point visible under the box's level of detail; element ids are
    stable functions of (row, column, member) so diffs stay meaningful.
    """
    width = layout.width
    height = layout.height
    parts: list[str] = []
    parts.append('<?xml version="1.0" encoding="UTF-8"?>')
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">'
    )
    parts.append(
        "<style>"
        ".box-outline{fill:none;stroke:#444;stroke-width:0.5}"
        ".collapsed{fill:#888}"
        ".pt{stroke:none}"
        ".pt.outlier{stroke:#000;stroke-width:0.4}"
        ".axis{stroke:#333;stroke-width:1}"
        ".lbl{font-family:sans-serif;font-size:9px;fill:#333}"
        "</style>"
    )

    axis = layout.axis
    axis_x = _MARGIN_LEFT - 12.0
    axis_top = _MARGIN_TOP
    axis_bottom = max(height - _MARGIN_BOTTOM, _MARGIN_TOP + 1.0)
    parts.append(
        f'<line id="axis" class="axis" x1="{axis_x:g}" y1="{axis_top:g}" '
        f'x2="{axis_x:g}" y2="{axis_bottom:g}"/>'
    )
    axis_dict = _axis_to_dict(axis)
    parts.append(
        f'<text id="axis-kind" class="lbl" x="4" y="{axis_top - 4:g}">'
        f"{_svg_escape(str(axis_dict['kind']))}</text>"
    )
    parts.append(
        f'<text id="axis-t0" class="lbl" x="4" y="{axis_top + 8:g}">'
        f"{_svg_escape(str(axis_dict['t0']))}</text>"
    )
    parts.append(
        f'<text id="axis-tN" class="lbl" x="4" y="{axis_bottom:g}">'
        f"{_svg_escape(str(axis_dict['tN']))}</text>"
    )

    for i, label in enumerate(layout.color_legend):
        swatch_x = _MARGIN_LEFT + i * 46.0
        parts.append(
            f'<rect id="legend-{i}" class="legend" x="{swatch_x:g}" y="8" '
            f'width="8" height="8" fill="{_PALETTE[i % len(_PALETTE)]}"/>'
        )
        parts.append(
            f'<text class="lbl" x="{swatch_x + 10:g}" y="15">{_svg_escape(label)}</text>'
        )

    for r, row in enumerate(layout.rows):
        for placed in row.boxes:
            base = f"r{r}-c{placed.column}"
            if placed.lod.collapsed:
                glyph_y = row.y + row.height / 2 - 2
                parts.append(
                    f'<rect id="box-{base}" class="collapsed" x="{placed.x:g}" '
                    f'y="{glyph_y:g}" width="{placed.width:g}" height="4"/>'
                )
                continue
            q = placed.box.q
            spread = q[4] - q[0]
            for s in range(4):
                if spread == 0:
                    seg_x, seg_w = placed.x, 0.0
                else:
                    left = (q[s] - q[0]) / spread
                    right = (q[s + 1] - q[0]) / spread
                    seg_x = placed.x + left * placed.width
                    seg_w = (right - left) * placed.width
                parts.append(
                    f'<rect id="qbox-{base}-{s}" class="qbox" x="{seg_x:g}" '
                    f'y="{row.y:g}" width="{seg_w:g}" height="{row.height:g}" '
                    f'fill="{_QUARTILE_FILLS[s]}"/>'
                )
            parts.append(
                f'<rect id="box-{base}" class="box-outline" x="{placed.x:g}" '
                f'y="{row.y:g}" width="{placed.width:g}" height="{row.height:g}"/>'
            )
            for point in placed.box.points:
                if point.is_outlier and not placed.lod.show_outlier_points:
                    continue
                if not point.is_outlier and not placed.lod.show_quartile_points:
                    continue
                px, py = point_position(placed, row, point)
                kind = "outlier" if point.is_outlier else "quartile"
                if placed.lod.color_mode is ColorMode.UNIFORM_ALPHA or point.color_key is None:
                    fill = 'fill="#333" fill-opacity="0.25"'
                else:
                    fill = f'fill="{_PALETTE[point.color_key % len(_PALETTE)]}"'
                parts.append(
                    f'<circle id="pt-{base}-{_ident(point.member_ref)}" '
                    f'class="pt {kind}" cx="{px:g}" cy="{py:g}" r="1.6" {fill}/>'
                )

    parts.append("</svg>")
    return "\n".join(parts)
