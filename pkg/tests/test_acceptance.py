"""Acceptance suite: one test per release criterion, each printing a
pass/fail line with its runtime bound. Run with `pytest tests/test_acceptance.py -s`
to see the lines on success.
"""

from __future__ import annotations

import json
import random
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from seqbox.alignment import AnchorSet, build_column_grid, match_anchors
from seqbox.cli import main as cli_main
from seqbox.ingest import parse_event_log
from seqbox.layout import layout_to_json
from seqbox.pipeline import OverviewParams, build_overview
from seqbox.sequences import build_sequences, extract_unique_sequences
from seqbox.service import create_app
from seqbox.similarity import (
    DistanceMatrix,
    complete_link_cluster,
    edit_distance,
    leaf_ordering,
)
from seqbox.synthetic import generate_csv, generate_log, load_spec, spec_from_dict
from seqbox.timestats import TimeScaleSpec, classify_outliers, quartiles
from seqbox.trend import trend_report

from test_similarity import oracle_edit_distance
from test_timestats import oracle_partition, oracle_quartiles

DEMO_SPEC = Path(__file__).parent / "data" / "demo_spec.json"


class _Criterion:
    def __init__(self, name: str, limit_seconds: float):
        self.name = name
        self.limit = limit_seconds

    def __enter__(self):
        self.started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, _tb):
        elapsed = time.perf_counter() - self.started
        if exc_type is not None:
            print(f"[FAIL] {self.name} after {elapsed:.2f}s: {exc}")
            return False
        status = "PASS" if elapsed < self.limit else "FAIL"
        print(f"[{status}] {self.name}: {elapsed:.2f}s (limit {self.limit:.0f}s)")
        assert elapsed < self.limit, f"{self.name} exceeded {self.limit}s"
        return False


def test_edit_distance_metric_suite():
    rng = random.Random(41)
    alphabet = [f"T{i}" for i in range(18)]

    def signature():
        return tuple(rng.choice(alphabet) for _ in range(rng.randint(0, 20)))

    with _Criterion("edit-distance metric suite (1000 triples)", 5.0):
        assert oracle_edit_distance(tuple("ABCDE"), tuple("BCDFG")) == 3
        assert edit_distance(tuple("ABCDE"), tuple("BCDFG")) == 3
        for _ in range(1000):
            a, b, c = signature(), signature(), signature()
            d_ab = edit_distance(a, b)
            d_ac = edit_distance(a, c)
            d_cb = edit_distance(c, b)
            assert d_ab == edit_distance(b, a)
            assert (d_ab == 0) == (a == b)
            assert d_ab <= d_ac + d_cb
            assert abs(len(a) - len(b)) <= d_ab <= max(len(a), len(b))


def test_quartile_outlier_oracle_equivalence():
    rng = random.Random(43)
    with _Criterion("quartile/outlier oracle equivalence (500 multisets)", 5.0):
        for _ in range(500):
            n = rng.randint(1, 1000)
            durations = [rng.paretovariate(1.15) * 90 for _ in range(n)]
            q = quartiles(durations)
            assert q == oracle_quartiles(durations)
            assert classify_outliers(durations, q, 1.5) == oracle_partition(durations, 1.5)


def _random_distance_matrix(rng: random.Random, n: int) -> DistanceMatrix:
    d = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = float(rng.randint(0, 20))
    return DistanceMatrix(n=n, d=tuple(tuple(row) for row in d))


def _assert_contiguous_permutation(tree, order):
    assert sorted(order) == list(range(tree.n_items))
    position = {leaf: i for i, leaf in enumerate(order)}
    leaves = {i: {i} for i in range(tree.n_items)}
    for step, (a, b, _height) in enumerate(tree.merges):
        merged = leaves[a] | leaves[b]
        leaves[tree.n_items + step] = merged
        spots = sorted(position[leaf] for leaf in merged)
        assert spots == list(range(spots[0], spots[0] + len(spots)))


def test_complete_link_monotonicity():
    rng = random.Random(47)
    with _Criterion("complete-link monotonicity (200 matrices)", 10.0):
        for _ in range(200):
            n = rng.randint(1, 50)
            tree = complete_link_cluster(_random_distance_matrix(rng, n))
            heights = [h for _a, _b, h in tree.merges]
            assert heights == sorted(heights)
            _assert_contiguous_permutation(tree, tree.leaf_order)
            frequencies = [rng.randint(1, 100) for _ in range(n)]
            _assert_contiguous_permutation(tree, leaf_ordering(tree, frequencies))


def test_alignment_coherence():
    rng = random.Random(53)
    with _Criterion("alignment coherence (200 instances)", 5.0):
        for _ in range(200):
            alphabet = [f"T{i}" for i in range(rng.randint(2, 12))]
            signatures = [
                tuple(rng.choice(alphabet) for _ in range(rng.randint(1, 14)))
                for _ in range(rng.randint(1, 20))
            ]
            anchors = AnchorSet(
                tuple(rng.sample(alphabet, rng.randint(0, min(4, len(alphabet)))))
            )
            matches = [
                match_anchors(s, anchors, row=i) for i, s in enumerate(signatures)
            ]
            base_order = list(range(len(signatures)))
            rng.shuffle(base_order)
            grid = build_column_grid(signatures, matches, anchors, base_order)
            for row, placement in enumerate(grid.placements):
                assert list(placement) == sorted(set(placement))
                for anchor_index, pos in matches[row].matched:
                    assert placement[pos] == grid.anchor_columns[anchor_index]
            if not anchors.anchors:
                assert grid.row_order == tuple(base_order)


def test_end_to_end_planted_scenario(tmp_path):
    spec = load_spec(DEMO_SPEC)
    with _Criterion("end-to-end planted scenario", 10.0):
        csv_text = generate_csv(spec)
        log = parse_event_log(csv_text)

        # Class I: five templates -> exactly five unique sequences at
        # coverage 1.0.
        uniques = extract_unique_sequences(build_sequences(log))
        assert len(uniques) == 5
        assert sorted(u.frequency for u in uniques) == [1, 4, 15, 30, 50]
        layout = build_overview(log, OverviewParams(coverage=1.0))
        assert len(layout.rows) == 5

        # Classes II and IV exercised through the service loop.
        client = TestClient(create_app(data_dir=str(tmp_path / "data")))
        dataset = client.post("/datasets", content=csv_text.encode("utf-8")).json()
        session = client.post(f"/datasets/{dataset['dataset_id']}/sessions").json()
        sid = session["session_id"]
        client.patch(
            f"/sessions/{sid}",
            json={"coverage": {"threshold": 1.0, "min_frequency": 1}},
        )

        # Class IV: the three planted outliers are flagged and traceable to
        # identifiers through the event-box detail endpoint.
        doc = client.get(f"/sessions/{sid}/overview").json()
        target_row = next(
            r for r in doc["rows"]
            if "Waiting Consultation" in r["signature"]
            and "Height and Weight" not in r["signature"]
        )
        target_box = next(
            b for b in target_row["boxes"]
            if b["event_type"] == "Waiting Consultation"
        )
        detail = client.get(
            f"/sessions/{sid}/eventbox/{target_row['row']}/{target_box['column']}"
        ).json()
        outliers = [p for p in detail["points"] if p["is_outlier"]]
        assert len(outliers) == 3
        flagged_members = {p["member"] for p in outliers}
        assert len(flagged_members) == 3
        planted = {
            s.identifier
            for s in build_sequences(log)
            if s.signature == tuple(target_row["signature"])
            and (s.events[2].end - s.events[2].start).total_seconds() > 1800 * 3.25
        }
        assert flagged_members == planted

        # Class III: the planted duration-versus-hour trend on the target
        # event is strongly negative.
        (entry,) = trend_report(
            log, TimeScaleSpec.hour_of_day(), event_types=["Height and Weight"]
        )
        assert entry.correlation <= -0.8

        # Class II: the template pair differing by one event aligns its
        # shared events into the same columns under anchors.
        client.patch(
            f"/sessions/{sid}",
            json={"anchors": ["Check-in Kiosk", "In Consultation"]},
        )
        aligned = client.get(f"/sessions/{sid}/overview").json()
        full_visit = next(
            r for r in aligned["rows"] if "Height and Weight" in r["signature"]
        )
        pair = next(
            r for r in aligned["rows"]
            if "Waiting Consultation" in r["signature"]
            and "Height and Weight" not in r["signature"]
        )
        for anchor in ("Check-in Kiosk", "In Consultation"):
            column_a = next(
                b["column"] for b in full_visit["boxes"] if b["event_type"] == anchor
            )
            column_b = next(
                b["column"] for b in pair["boxes"] if b["event_type"] == anchor
            )
            assert column_a == column_b


def _scale_spec_dict() -> dict:
    rng = random.Random(61)
    alphabet = [f"T{i:02d}" for i in range(18)]
    signatures: set[tuple[str, ...]] = set()
    while len(signatures) < 160:
        signatures.add(
            tuple(rng.choice(alphabet) for _ in range(rng.randint(6, 12)))
        )
    ordered = sorted(signatures)
    weights = [1 / (i + 1) for i in range(160)]
    scale = 25000 / sum(weights)
    templates = []
    for i, signature in enumerate(ordered):
        templates.append(
            {
                "name": f"tpl-{i:03d}",
                "signature": list(signature),
                "frequency": max(1, round(weights[i] * scale)),
                "durations": [
                    {"min_seconds": 60, "max_seconds": 1800} for _ in signature
                ],
            }
        )
    return {
        "seed": 67,
        "start_date": "2019-01-01",
        "days": 365,
        "templates": templates,
    }


def test_scale_smoke():
    spec = spec_from_dict(_scale_spec_dict())
    log = generate_log(spec)
    n_sequences = sum(t.frequency for t in spec.templates)
    assert 20000 <= n_sequences <= 30000
    assert len(spec.templates) == 160
    with _Criterion(
        f"scale smoke ({n_sequences} sequences, 160 unique signatures)", 30.0
    ):
        layout = build_overview(log, OverviewParams(coverage=1.0))
        document = layout_to_json(layout)
    assert len(layout.rows) == 160
    assert json.loads(document)["totals"]["n_sequences"] == n_sequences


def test_cli_and_service_documents_identical(tmp_path):
    with _Criterion("CLI/service byte-identical documents", 30.0):
        csv_path = tmp_path / "demo.csv"
        out_path = tmp_path / "overview.json"
        csv_text = generate_csv(load_spec(DEMO_SPEC))
        csv_path.write_text(csv_text, encoding="utf-8")
        with pytest.raises(SystemExit) as exc:
            cli_main(["overview", str(csv_path), "--out", str(out_path)])
        assert exc.value.code in (0, None)

        client = TestClient(create_app(data_dir=str(tmp_path / "data")))
        dataset = client.post("/datasets", content=csv_text.encode("utf-8")).json()
        session = client.post(f"/datasets/{dataset['dataset_id']}/sessions").json()
        service_bytes = client.get(
            f"/sessions/{session['session_id']}/overview"
        ).content
        assert out_path.read_bytes() == service_bytes
