from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from seqbox.sequences import (
    build_sequences,
    extract_unique_sequences,
    select_by_coverage,
)

from conftest import log_of, rec


def _sequences_for(signatures: list[list[str]]):
    records = []
    for i, signature in enumerate(signatures):
        for p, event_type in enumerate(signature):
            records.append(rec(f"p{i}", event_type, start_offset=p * 60, duration=30))
    return build_sequences(log_of(*records))


def _uniques_with_frequencies(frequencies: list[int]):
    """One unique sequence per frequency, signatures distinct by index."""
    signatures = []
    for i, freq in enumerate(frequencies):
        signatures.extend([[f"T{i:03d}"]] * freq)
    return extract_unique_sequences(_sequences_for(signatures))


def test_build_sequences_groups_by_identifier():
    log = log_of(
        rec("p1", "A", 0, 60),
        rec("p1", "B", 120, 60),
        rec("p2", "A", 30, 60),
    )
    sequences = build_sequences(log)
    assert [s.identifier for s in sequences] == ["p1", "p2"]
    assert [len(s.events) for s in sequences] == [2, 1]


def test_build_sequences_single_record():
    sequences = build_sequences(log_of(rec("p1", "A", 0)))
    assert len(sequences) == 1
    assert sequences[0].signature == ("A",)


def test_build_sequences_sorts_by_start_with_stable_ties():
    log = log_of(
        rec("p1", "later", 60),
        rec("p1", "first-in-file", 0),
        rec("p1", "second-in-file", 0),
    )
    (sequence,) = build_sequences(log)
    assert sequence.signature == ("first-in-file", "second-in-file", "later")


def test_build_sequences_multiset_preserved():
    records = [rec(f"p{i % 4}", f"E{i % 3}", i) for i in range(24)]
    sequences = build_sequences(log_of(*records))
    regrouped = sorted((e for s in sequences for e in s.events), key=lambda r: r.start)
    assert regrouped == sorted(records, key=lambda r: r.start)


def test_extract_unique_sequences_groups_exactly():
    uniques = extract_unique_sequences(_sequences_for([["A", "B"], ["A", "B"], ["A", "C"]]))
    assert [(u.signature, u.frequency) for u in uniques] == [
        (("A", "B"), 2),
        (("A", "C"), 1),
    ]


def test_extract_unique_sequences_all_identical():
    uniques = extract_unique_sequences(_sequences_for([["A", "B"]] * 5))
    assert len(uniques) == 1
    assert uniques[0].frequency == 5


def test_extract_unique_sequences_all_distinct():
    uniques = extract_unique_sequences(
        _sequences_for([["A"], ["B"], ["C"], ["D"]])
    )
    assert len(uniques) == 4
    assert all(u.frequency == 1 for u in uniques)


def test_extract_unique_sequences_ties_lexicographic():
    uniques = extract_unique_sequences(_sequences_for([["B"], ["A"], ["C"]]))
    assert [u.signature for u in uniques] == [("A",), ("B",), ("C",)]


def test_extract_unique_sequences_is_partition():
    sequences = _sequences_for([["A", "B"], ["A"], ["A", "B"], ["C"], ["A"]])
    uniques = extract_unique_sequences(sequences)
    members = [m for u in uniques for m in u.members]
    assert sorted(m.identifier for m in members) == sorted(s.identifier for s in sequences)
    assert sum(u.frequency for u in uniques) == len(sequences)


def test_select_by_coverage_prefix_rule():
    uniques = _uniques_with_frequencies([50, 30, 15, 5])
    selection = select_by_coverage(uniques, threshold=0.8, min_frequency=1)
    assert [u.frequency for u in selection.selected] == [50, 30]
    assert selection.coverage_ratio == pytest.approx(0.80)


def test_select_by_coverage_threshold_one_selects_all():
    uniques = _uniques_with_frequencies([50, 30, 15, 5])
    selection = select_by_coverage(uniques, threshold=1.0, min_frequency=1)
    assert len(selection.selected) == 4
    assert selection.coverage_ratio == 1.0


def test_select_by_coverage_min_frequency_floor():
    # Prefix rule picks [10, 1] to pass 0.9, then the floor drops the 1;
    # the reported ratio reflects the final selection: 10/12.
    uniques = _uniques_with_frequencies([10, 1, 1])
    selection = select_by_coverage(uniques, threshold=0.9, min_frequency=2)
    assert [u.frequency for u in selection.selected] == [10]
    assert selection.coverage_ratio == pytest.approx(10 / 12)


def test_select_by_coverage_validates_inputs():
    uniques = _uniques_with_frequencies([5])
    with pytest.raises(ValueError):
        select_by_coverage(uniques, threshold=0.0)
    with pytest.raises(ValueError):
        select_by_coverage(uniques, threshold=1.5)
    with pytest.raises(ValueError):
        select_by_coverage(uniques, min_frequency=0)


@given(
    st.lists(st.integers(min_value=1, max_value=50), min_size=1, max_size=20),
    st.floats(min_value=0.01, max_value=1.0),
    st.floats(min_value=0.01, max_value=1.0),
)
def test_coverage_monotone_in_threshold(frequencies, t1, t2):
    t1, t2 = min(t1, t2), max(t1, t2)
    uniques = _uniques_with_frequencies(sorted(frequencies, reverse=True))
    low = select_by_coverage(uniques, threshold=t1).selected
    high = select_by_coverage(uniques, threshold=t2).selected
    assert list(high[: len(low)]) == list(low)


@given(st.lists(st.integers(min_value=1, max_value=50), min_size=1, max_size=20))
def test_coverage_meets_threshold_without_floor(frequencies):
    uniques = _uniques_with_frequencies(sorted(frequencies, reverse=True))
    selection = select_by_coverage(uniques, threshold=0.8, min_frequency=1)
    assert (
        selection.coverage_ratio >= 0.8
        or len(selection.selected) == len(uniques)
    )


def test_determinism_same_input_same_order():
    signatures = [["B", "A"], ["A"], ["B", "A"], ["A", "B"], ["A"]]
    first = extract_unique_sequences(_sequences_for(signatures))
    second = extract_unique_sequences(_sequences_for(signatures))
    assert [u.signature for u in first] == [u.signature for u in second]
