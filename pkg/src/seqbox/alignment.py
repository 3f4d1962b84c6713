"""Anchor alignment: force user-selected event types into shared columns.

Anchors are matched against each signature by a greedy leftmost subsequence
scan. The column grid reserves one dedicated column per anchor plus an
inter-anchor region sized to the widest row segment assigned to it, so the
layout can never overflow. Rows are re-sorted by how well they match the
anchors, falling back to the similarity ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .similarity import edit_distance


class GridOverflow(RuntimeError):
    """A row segment exceeded its region width; indicates an internal fault."""


@dataclass(frozen=True)
class AnchorSet:
    anchors: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.anchors)) != len(self.anchors):
            raise ValueError("anchors must be distinct event types")

    def __len__(self) -> int:
        return len(self.anchors)


@dataclass(frozen=True)
class AnchorMatch:
    row: int
    matched: tuple[tuple[int, int], ...]  # (anchor index, signature position)
    unmatched: frozenset[int]


@dataclass(frozen=True)
class ColumnGrid:
    anchor_columns: tuple[int, ...]
    total_columns: int
    placements: tuple[tuple[int, ...], ...]  # per row, column of each position
    row_order: tuple[int, ...]


def match_anchors(
    signature: Sequence[str], anchors: AnchorSet, row: int = 0
) -> AnchorMatch:
    """Greedy leftmost subsequence match of anchors against a signature.

    Anchors are scanned in order; each one takes the first occurrence
    strictly after the previous match. An anchor with no occurrence is
    recorded unmatched and scanning continues from the same position.
    """
    matched: list[tuple[int, int]] = []
    unmatched: set[int] = set()
    pos = 0
    for anchor_index, anchor in enumerate(anchors.anchors):
        found = -1
        for p in range(pos, len(signature)):
            if signature[p] == anchor:
                found = p
                break
        if found < 0:
            unmatched.add(anchor_index)
        else:
            matched.append((anchor_index, found))
            pos = found + 1
    return AnchorMatch(row=row, matched=tuple(matched), unmatched=frozenset(unmatched))


def _row_segments(
    signature_length: int, match: AnchorMatch
) -> list[tuple[int, range, bool]]:
    """Split a row's positions into (region, positions, right_aligned) segments.

    Regions are numbered 0..k: region r sits immediately before anchor r,
    region k is the suffix after the last anchor. The prefix ahead of the
    first matched anchor packs right against that anchor's column; every
    other segment packs left after the anchor it follows. Rows matching no
    anchor are treated as one prefix segment in region 0, packed left.
    """
    if not match.matched:
        return [(0, range(signature_length), False)] if signature_length else []
    segments: list[tuple[int, range, bool]] = []
    first_anchor, first_pos = match.matched[0]
    if first_pos:
        segments.append((first_anchor, range(first_pos), True))
    for (anchor_a, pos_a), (_anchor_b, pos_b) in zip(match.matched, match.matched[1:]):
        if pos_b - pos_a > 1:
            segments.append((anchor_a + 1, range(pos_a + 1, pos_b), False))
    last_anchor, last_pos = match.matched[-1]
    if last_pos + 1 < signature_length:
        segments.append((last_anchor + 1, range(last_pos + 1, signature_length), False))
    return segments


def build_column_grid(
    signatures: Sequence[Sequence[str]],
    matches: Sequence[AnchorMatch],
    anchors: AnchorSet,
    base_order: Sequence[int],
) -> ColumnGrid:
    """Lay the rows onto a shared grid of region columns and anchor columns.

    Region widths are the maximum segment population over all rows, computed
    before any placement, and the row order key is (matched anchors desc,
    edit distance of the matched anchor types to the full anchor list asc,
    base order).
    """
    if len(signatures) != len(matches):
        raise ValueError("matches must align with rows")
    k = len(anchors)
    n_regions = k + 1
    segments_by_row = [
        _row_segments(len(signatures[row]), matches[row])
        for row in range(len(signatures))
    ]

    widths = [0] * n_regions
    for segments in segments_by_row:
        for region, positions, _right in segments:
            widths[region] = max(widths[region], len(positions))

    region_start = [0] * n_regions
    anchor_columns: list[int] = []
    x = 0
    for region in range(n_regions):
        region_start[region] = x
        x += widths[region]
        if region < k:
            anchor_columns.append(x)
            x += 1
    total_columns = x

    placements: list[tuple[int, ...]] = []
    for row, segments in enumerate(segments_by_row):
        columns = [0] * len(signatures[row])
        for anchor_index, pos in matches[row].matched:
            columns[pos] = anchor_columns[anchor_index]
        for region, positions, right_aligned in segments:
            if len(positions) > widths[region]:
                raise GridOverflow(
                    f"row {row} places {len(positions)} events in region "
                    f"{region} of width {widths[region]}"
                )
            if right_aligned:
                start = region_start[region] + widths[region] - len(positions)
            else:
                start = region_start[region]
            for offset, pos in enumerate(positions):
                columns[pos] = start + offset
        placements.append(tuple(columns))

    anchor_types = list(anchors.anchors)

    def sort_key(row: int) -> tuple[int, int]:
        matched_types = [anchor_types[a] for a, _pos in matches[row].matched]
        return (-len(matches[row].matched), edit_distance(matched_types, anchor_types))

    row_order = tuple(sorted(base_order, key=sort_key))
    return ColumnGrid(
        anchor_columns=tuple(anchor_columns),
        total_columns=total_columns,
        placements=tuple(placements),
        row_order=row_order,
    )
