from __future__ import annotations

import random

import pytest

from seqbox.alignment import (
    AnchorSet,
    build_column_grid,
    match_anchors,
)


def _grid(signatures, anchors, base_order=None):
    anchor_set = AnchorSet(tuple(anchors))
    matches = [
        match_anchors(signature, anchor_set, row=i)
        for i, signature in enumerate(signatures)
    ]
    order = list(range(len(signatures))) if base_order is None else base_order
    return build_column_grid(signatures, matches, anchor_set, order)


def test_anchor_set_requires_distinct():
    with pytest.raises(ValueError):
        AnchorSet(("A", "A"))


def test_match_single_occurrence():
    match = match_anchors(("A", "B", "C", "D"), AnchorSet(("C",)))
    assert match.matched == ((0, 2),)
    assert match.unmatched == frozenset()


def test_match_leftmost_rule():
    match = match_anchors(("C", "X", "C"), AnchorSet(("C",)))
    assert match.matched == ((0, 0),)


def test_match_skip_and_continue():
    match = match_anchors(("A", "D"), AnchorSet(("B", "D")))
    assert match.matched == ((1, 1),)
    assert match.unmatched == frozenset({0})


def test_match_positions_strictly_increase():
    match = match_anchors(("A", "X", "B"), AnchorSet(("A", "missing", "B")))
    # Even with a miss in between, later anchors scan past earlier matches.
    assert match.matched == ((0, 0), (2, 2))
    assert match.unmatched == frozenset({1})


def test_grid_single_anchor_shared_column():
    grid = _grid([("A", "B", "C", "D"), ("X", "C", "Y")], ["C"])
    assert grid.anchor_columns == (2,)
    assert grid.total_columns == 4
    # Row 0: two prefix events fill the region; row 1's X packs right
    # against the anchor column.
    assert grid.placements[0] == (0, 1, 2, 3)
    assert grid.placements[1] == (1, 2, 3)


def test_grid_empty_anchor_set_is_left_aligned_identity():
    grid = _grid([("A", "B", "C"), ("X",)], [], base_order=[1, 0])
    assert grid.anchor_columns == ()
    assert grid.total_columns == 3
    assert grid.placements[0] == (0, 1, 2)
    assert grid.placements[1] == (0,)
    assert grid.row_order == (1, 0)


def test_grid_two_anchors_middle_region():
    grid = _grid([("A", "B", "D"), ("B", "X", "D")], ["B", "D"])
    b_col, d_col = grid.anchor_columns
    assert grid.placements[0] == (0, b_col, d_col)
    assert grid.placements[1] == (b_col, b_col + 1, d_col)
    assert grid.total_columns == 4


def test_grid_zero_match_rows_pack_from_column_zero():
    grid = _grid([("A", "B", "C"), ("X", "Y")], ["C"])
    assert grid.placements[1] == (0, 1)
    c_col = grid.anchor_columns[0]
    assert grid.placements[0][2] == c_col
    # The no-match row shares the prefix region, so region width covers it.
    assert c_col >= 2


def test_row_order_prefers_more_matches_then_anchor_distance():
    signatures = [
        ("X", "Y"),          # no matches
        ("A", "C"),          # matches C only
        ("A", "B", "C"),     # matches B and C
        ("B", "Q", "C"),     # matches B and C
    ]
    grid = _grid(signatures, ["B", "C"], base_order=[0, 1, 2, 3])
    assert grid.row_order == (2, 3, 1, 0)


def test_row_order_stable_for_equal_match_signatures():
    signatures = [("A", "B"), ("Z", "B"), ("Q", "B")]
    grid = _grid(signatures, ["B"], base_order=[2, 0, 1])
    assert grid.row_order == (2, 0, 1)


def _random_instance(rng: random.Random):
    alphabet = [f"T{i}" for i in range(rng.randint(2, 10))]
    signatures = [
        tuple(rng.choice(alphabet) for _ in range(rng.randint(1, 12)))
        for _ in range(rng.randint(1, 15))
    ]
    n_anchors = rng.randint(0, min(4, len(alphabet)))
    anchors = rng.sample(alphabet, n_anchors)
    base_order = list(range(len(signatures)))
    rng.shuffle(base_order)
    return signatures, anchors, base_order


@pytest.mark.parametrize("seed", range(25))
def test_grid_invariants_on_random_instances(seed):
    rng = random.Random(seed)
    signatures, anchors, base_order = _random_instance(rng)
    anchor_set = AnchorSet(tuple(anchors))
    matches = [
        match_anchors(signature, anchor_set, row=i)
        for i, signature in enumerate(signatures)
    ]
    grid = build_column_grid(signatures, matches, anchor_set, base_order)

    assert sorted(grid.row_order) == sorted(base_order)
    for row, placement in enumerate(grid.placements):
        assert len(placement) == len(signatures[row])
        assert list(placement) == sorted(placement)
        assert len(set(placement)) == len(placement)
        assert all(0 <= c < grid.total_columns for c in placement)
        for anchor_index, pos in matches[row].matched:
            assert placement[pos] == grid.anchor_columns[anchor_index]
    if not anchors:
        assert grid.row_order == tuple(base_order)


def test_match_invariants_on_random_instances():
    rng = random.Random(99)
    for _ in range(200):
        signatures, anchors, _order = _random_instance(rng)
        anchor_set = AnchorSet(tuple(anchors))
        for signature in signatures:
            match = match_anchors(signature, anchor_set)
            anchor_indices = [a for a, _p in match.matched]
            positions = [p for _a, p in match.matched]
            assert anchor_indices == sorted(anchor_indices)
            assert positions == sorted(set(positions))
            assert set(anchor_indices) | match.unmatched == set(range(len(anchors)))
            assert set(anchor_indices) & match.unmatched == set()
            for anchor_index, pos in match.matched:
                assert signature[pos] == anchors[anchor_index]
