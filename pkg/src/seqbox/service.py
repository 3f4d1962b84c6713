"""HTTP service exposing datasets and exploration sessions.

The service keeps the whole interaction loop server-side: clients upload CSV
logs, open sessions, patch exploration state (anchors, filters, scales,
levels of detail, breakdowns), and read back canonical layout documents.
Layout geometry is computed by the same engine the CLI uses, so identical
state always yields byte-identical documents.

Configuration comes from the environment: LISTEN_ADDR (default
127.0.0.1:8080), DATA_DIR (default ./data), MAX_UPLOAD_BYTES.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from datetime import date
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .ingest import EventLog, IngestError, format_timestamp, parse_event_log
from .layout import layout_to_json
from .pipeline import (
    DEFAULT_COVERAGE,
    DEFAULT_LOD,
    DEFAULT_MIN_FREQUENCY,
    OverviewModel,
    OverviewParams,
    build_model,
    layout_from_model,
)
from .sequences import build_sequences, extract_unique_sequences
from .timestats import (
    FilterSpec,
    LodPreset,
    ScaleKind,
    StatsConfig,
    TimeScaleSpec,
    WEEKDAY_LABELS,
)

DEFAULT_LISTEN_ADDR = "127.0.0.1:8080"
DEFAULT_MAX_UPLOAD_BYTES = 50 * 1024 * 1024

_CYCLIC_KINDS = {
    ScaleKind.HOUR_OF_DAY.value,
    ScaleKind.DAY_OF_WEEK.value,
    ScaleKind.DAY_OF_MONTH.value,
    ScaleKind.MONTH_OF_YEAR.value,
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.field = field

    def body(self) -> dict:
        payload: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.field is not None:
            payload["field"] = self.field
        return payload


def default_session_state(session_id: str, dataset_id: str) -> dict:
    return {
        "session_id": session_id,
        "dataset_id": dataset_id,
        "anchors": [],
        "filter": {"date_from": None, "date_to": None, "days_of_week": None},
        "axis_scale": {"kind": ScaleKind.HOUR_OF_DAY.value},
        "color_scale": {"kind": ScaleKind.DAY_OF_WEEK.value},
        "stats": {"k": 1.5},
        "coverage": {
            "threshold": DEFAULT_COVERAGE,
            "min_frequency": DEFAULT_MIN_FREQUENCY,
        },
        "lods": {"default": DEFAULT_LOD.value, "cells": [], "event_types": {}},
        "breakdowns": [],
    }


def params_from_state(state: dict) -> OverviewParams:
    filter_state = state["filter"]
    days = filter_state.get("days_of_week")
    spec = FilterSpec(
        date_from=date.fromisoformat(filter_state["date_from"])
        if filter_state.get("date_from")
        else None,
        date_to=date.fromisoformat(filter_state["date_to"])
        if filter_state.get("date_to")
        else None,
        days_of_week=frozenset(days) if days else None,
    )

    def scale(value: Optional[dict]):
        if value is None:
            return None
        kind = ScaleKind(value["kind"])
        if "t0" in value and "tN" in value:
            return TimeScaleSpec(kind, float(value["t0"]), float(value["tN"]))
        return kind

    lods = state["lods"]
    return OverviewParams(
        coverage=state["coverage"]["threshold"],
        min_frequency=state["coverage"]["min_frequency"],
        anchors=tuple(state["anchors"]),
        filter=spec,
        axis=scale(state["axis_scale"]),
        color=scale(state.get("color_scale")),
        stats=StatsConfig(k=state["stats"]["k"]),
        default_lod=LodPreset(lods.get("default", DEFAULT_LOD.value)),
        lod_cells={
            (int(row), int(col)): LodPreset(preset)
            for row, col, preset in lods.get("cells", [])
        },
        lod_event_types={
            event_type: LodPreset(preset)
            for event_type, preset in lods.get("event_types", {}).items()
        },
        breakdowns=frozenset(tuple(sig) for sig in state.get("breakdowns", [])),
    )


class Store:
    """Disk-backed datasets and replayable session patch logs."""

    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.datasets_dir = data_dir / "datasets"
        self.sessions_dir = data_dir / "sessions"
        self.datasets_dir.mkdir(parents=True, exist_ok=True)
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._logs: dict[str, EventLog] = {}
        self._sessions: dict[str, dict] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._overview_cache: dict[str, tuple[str, bytes, OverviewModel]] = {}
        self._load_sessions()

    # -- datasets ----------------------------------------------------------

    def create_dataset(self, csv_text: str) -> dict:
        log = parse_event_log(csv_text)
        dataset_id = hashlib.sha256(csv_text.encode("utf-8")).hexdigest()[:12]
        sequences = build_sequences(log)
        uniques = extract_unique_sequences(sequences)
        meta = {
            "summary": {
                "dataset_id": dataset_id,
                "n_event_types": len(log.type_catalog),
                "n_sequences": len(sequences),
                "n_unique_sequences": len(uniques),
                "time_extent": [
                    format_timestamp(log.time_extent[0]),
                    format_timestamp(log.time_extent[1]),
                ],
            },
            "event_types": sorted(log.type_catalog),
        }
        target = self.datasets_dir / dataset_id
        target.mkdir(parents=True, exist_ok=True)
        (target / "log.csv").write_text(csv_text, encoding="utf-8")
        (target / "meta.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
        with self._lock:
            self._logs[dataset_id] = log
        return meta["summary"]

    def _dataset_dir(self, dataset_id: str) -> Path:
        return self.datasets_dir / dataset_id

    def dataset_meta(self, dataset_id: str) -> dict:
        meta_path = self._dataset_dir(dataset_id) / "meta.json"
        if not meta_path.exists():
            raise ApiError(404, "UnknownDataset", f"no dataset {dataset_id}")
        return json.loads(meta_path.read_text(encoding="utf-8"))

    def dataset_log(self, dataset_id: str, *, gone_status: int = 404) -> EventLog:
        with self._lock:
            cached = self._logs.get(dataset_id)
        csv_path = self._dataset_dir(dataset_id) / "log.csv"
        if not csv_path.exists():
            code = "DatasetDeleted" if gone_status == 409 else "UnknownDataset"
            raise ApiError(gone_status, code, f"dataset {dataset_id} is not available")
        if cached is not None:
            return cached
        log = parse_event_log(csv_path.read_text(encoding="utf-8"))
        with self._lock:
            self._logs[dataset_id] = log
        return log

    # -- sessions ----------------------------------------------------------

    def _session_path(self, session_id: str) -> Path:
        return self.sessions_dir / f"{session_id}.jsonl"

    def _load_sessions(self) -> None:
        for path in sorted(self.sessions_dir.glob("*.jsonl")):
            state: Optional[dict] = None
            for line in path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                entry = json.loads(line)
                if entry.get("event") == "create":
                    state = entry["state"]
                elif entry.get("event") == "patch" and state is not None:
                    state.update(entry["patch"])
            if state is not None:
                self._sessions[state["session_id"]] = state
                self._session_locks[state["session_id"]] = threading.Lock()

    def create_session(self, dataset_id: str) -> dict:
        self.dataset_meta(dataset_id)  # 404 when unknown
        session_id = uuid.uuid4().hex
        state = default_session_state(session_id, dataset_id)
        self._session_path(session_id).write_text(
            json.dumps({"event": "create", "state": state}) + "\n", encoding="utf-8"
        )
        with self._lock:
            self._sessions[session_id] = state
            self._session_locks[session_id] = threading.Lock()
        return state

    def session_lock(self, session_id: str) -> threading.Lock:
        with self._lock:
            lock = self._session_locks.get(session_id)
        if lock is None:
            raise ApiError(404, "UnknownSession", f"no session {session_id}")
        return lock

    def session_state(self, session_id: str) -> dict:
        with self.session_lock(session_id):
            state = self._sessions.get(session_id)
            if state is None:
                raise ApiError(404, "UnknownSession", f"no session {session_id}")
            return json.loads(json.dumps(state))  # deep copy snapshot

    def apply_patch(self, session_id: str, patch: dict) -> dict:
        with self.session_lock(session_id):
            state = self._sessions.get(session_id)
            if state is None:
                raise ApiError(404, "UnknownSession", f"no session {session_id}")
            state.update(json.loads(json.dumps(patch)))
            with self._session_path(session_id).open("a", encoding="utf-8") as fh:
                fh.write(json.dumps({"event": "patch", "patch": patch}) + "\n")
            return json.loads(json.dumps(state))

    def delete_session(self, session_id: str) -> None:
        with self._lock:
            if session_id not in self._sessions:
                raise ApiError(404, "UnknownSession", f"no session {session_id}")
            del self._sessions[session_id]
            del self._session_locks[session_id]
            self._overview_cache.pop(session_id, None)
        self._session_path(session_id).unlink(missing_ok=True)

    # -- overview cache ----------------------------------------------------

    def overview(self, session_id: str) -> tuple[bytes, OverviewModel]:
        state = self.session_state(session_id)
        key = json.dumps(state, sort_keys=True)
        with self._lock:
            cached = self._overview_cache.get(session_id)
        if cached is not None and cached[0] == key:
            return cached[1], cached[2]
        log = self.dataset_log(state["dataset_id"], gone_status=409)
        params = params_from_state(state)
        model = build_model(log, params)
        document = layout_to_json(layout_from_model(model, params)).encode("utf-8")
        with self._lock:
            self._overview_cache[session_id] = (key, document, model)
        return document, model


# -- patch validation -------------------------------------------------------

_PATCHABLE = {
    "anchors",
    "filter",
    "axis_scale",
    "color_scale",
    "stats",
    "coverage",
    "lods",
    "breakdowns",
}

_DAY_NAMES = {name: i for i, name in enumerate(WEEKDAY_LABELS)}


def _invalid(field: str, message: str) -> ApiError:
    return ApiError(422, "InvalidField", message, field=field)


def _validate_days(value: Any, field: str) -> list[int]:
    if not isinstance(value, list) or not value:
        raise _invalid(field, "days_of_week must be a nonempty list")
    days: list[int] = []
    for item in value:
        if isinstance(item, str) and item in _DAY_NAMES:
            days.append(_DAY_NAMES[item])
        elif isinstance(item, int) and 0 <= item <= 6:
            days.append(item)
        else:
            raise _invalid(field, f"bad weekday {item!r}; use 0..6 or Mon..Sun")
    return sorted(set(days))


def _validate_scale(value: Any, field: str, *, allow_none: bool, color: bool) -> Any:
    if value is None:
        if allow_none:
            return None
        raise _invalid(field, "scale is required")
    if not isinstance(value, dict) or "kind" not in value:
        raise _invalid(field, "scale must be an object with a 'kind'")
    kind = value["kind"]
    if color:
        if kind not in _CYCLIC_KINDS:
            raise _invalid(field, f"color scale must be cyclic, got {kind!r}")
        return {"kind": kind}
    if kind not in _CYCLIC_KINDS | {ScaleKind.ABSOLUTE.value}:
        raise _invalid(field, f"unknown scale kind {kind!r}")
    extra = set(value) - {"kind", "t0", "tN"}
    if extra:
        raise _invalid(field, f"unexpected scale keys {sorted(extra)}")
    if kind == ScaleKind.ABSOLUTE.value:
        if "t0" in value or "tN" in value:
            raise _invalid(field, "absolute bounds are derived from the data")
        return {"kind": kind}
    if ("t0" in value) != ("tN" in value):
        raise _invalid(field, "t0 and tN must be given together")
    if "t0" in value:
        try:
            t0, tN = float(value["t0"]), float(value["tN"])
        except (TypeError, ValueError):
            raise _invalid(field, "t0 and tN must be numbers") from None
        if not t0 < tN:
            raise _invalid(field, "t0 must be < tN")
        return {"kind": kind, "t0": t0, "tN": tN}
    return {"kind": kind}


def _validate_lods(value: Any, field: str, catalog: set[str]) -> dict:
    if not isinstance(value, dict):
        raise _invalid(field, "lods must be an object")
    extra = set(value) - {"default", "cells", "event_types"}
    if extra:
        raise _invalid(field, f"unexpected lods keys {sorted(extra)}")
    presets = {p.value for p in LodPreset}
    default = value.get("default", DEFAULT_LOD.value)
    if default not in presets:
        raise _invalid(field, f"unknown preset {default!r}")
    cells = []
    for cell in value.get("cells", []):
        if (
            not isinstance(cell, (list, tuple))
            or len(cell) != 3
            or not isinstance(cell[0], int)
            or not isinstance(cell[1], int)
            or cell[0] < 0
            or cell[1] < 0
            or cell[2] not in presets
        ):
            raise _invalid(field, f"bad lod cell {cell!r}; expected [row, col, preset]")
        cells.append([cell[0], cell[1], cell[2]])
    event_types = {}
    for event_type, preset in value.get("event_types", {}).items():
        if event_type not in catalog:
            raise _invalid(field, f"event type {event_type!r} not in the type catalog")
        if preset not in presets:
            raise _invalid(field, f"unknown preset {preset!r}")
        event_types[event_type] = preset
    return {"default": default, "cells": cells, "event_types": event_types}


def validate_patch(patch: Any, catalog: set[str]) -> dict:
    """Check a session patch field by field; returns the canonical form."""
    if not isinstance(patch, dict):
        raise ApiError(422, "InvalidPatch", "patch body must be a JSON object")
    unknown = set(patch) - _PATCHABLE
    if unknown:
        field = sorted(unknown)[0]
        raise _invalid(field, f"unknown session field {field!r}")
    clean: dict[str, Any] = {}

    if "anchors" in patch:
        anchors = patch["anchors"]
        if not isinstance(anchors, list) or not all(isinstance(a, str) for a in anchors):
            raise _invalid("anchors", "anchors must be a list of event types")
        if len(set(anchors)) != len(anchors):
            raise _invalid("anchors", "anchors must be distinct")
        for anchor in anchors:
            if anchor not in catalog:
                raise _invalid("anchors", f"event type {anchor!r} not in the type catalog")
        clean["anchors"] = anchors

    if "filter" in patch:
        value = patch["filter"]
        if not isinstance(value, dict):
            raise _invalid("filter", "filter must be an object")
        extra = set(value) - {"date_from", "date_to", "days_of_week"}
        if extra:
            raise _invalid("filter", f"unexpected filter keys {sorted(extra)}")
        parsed: dict[str, Any] = {"date_from": None, "date_to": None, "days_of_week": None}
        for bound in ("date_from", "date_to"):
            raw = value.get(bound)
            if raw is None:
                continue
            try:
                parsed[bound] = date.fromisoformat(raw).isoformat()
            except (TypeError, ValueError):
                raise _invalid("filter", f"{bound} must be an ISO date") from None
        if (
            parsed["date_from"] is not None
            and parsed["date_to"] is not None
            and parsed["date_from"] > parsed["date_to"]
        ):
            raise _invalid("filter", "date_from must be <= date_to")
        if value.get("days_of_week") is not None:
            parsed["days_of_week"] = _validate_days(value["days_of_week"], "filter")
        clean["filter"] = parsed

    if "axis_scale" in patch:
        clean["axis_scale"] = _validate_scale(
            patch["axis_scale"], "axis_scale", allow_none=False, color=False
        )

    if "color_scale" in patch:
        clean["color_scale"] = _validate_scale(
            patch["color_scale"], "color_scale", allow_none=True, color=True
        )

    if "stats" in patch:
        value = patch["stats"]
        if not isinstance(value, dict) or set(value) - {"k"}:
            raise _invalid("stats", "stats accepts only 'k'")
        try:
            k = float(value.get("k", 1.5))
        except (TypeError, ValueError):
            raise _invalid("stats", "k must be a number") from None
        if k <= 0:
            raise _invalid("stats", "k must be > 0")
        clean["stats"] = {"k": k}

    if "coverage" in patch:
        value = patch["coverage"]
        if not isinstance(value, dict) or set(value) - {"threshold", "min_frequency"}:
            raise _invalid("coverage", "coverage accepts threshold and min_frequency")
        threshold = value.get("threshold", DEFAULT_COVERAGE)
        min_frequency = value.get("min_frequency", DEFAULT_MIN_FREQUENCY)
        if not isinstance(threshold, (int, float)) or not 0 < threshold <= 1:
            raise _invalid("coverage", "threshold must be in (0, 1]")
        if not isinstance(min_frequency, int) or min_frequency < 1:
            raise _invalid("coverage", "min_frequency must be an integer >= 1")
        clean["coverage"] = {"threshold": float(threshold), "min_frequency": min_frequency}

    if "lods" in patch:
        clean["lods"] = _validate_lods(patch["lods"], "lods", catalog)

    if "breakdowns" in patch:
        value = patch["breakdowns"]
        if not isinstance(value, list) or not all(
            isinstance(sig, list) and sig and all(isinstance(s, str) for s in sig)
            for sig in value
        ):
            raise _invalid("breakdowns", "breakdowns must be a list of signatures")
        clean["breakdowns"] = value

    return clean


# -- app --------------------------------------------------------------------


def create_app(
    data_dir: Optional[str] = None,
    max_upload_bytes: Optional[int] = None,
) -> FastAPI:
    data_root = Path(data_dir or os.environ.get("DATA_DIR", "./data"))
    upload_limit = (
        max_upload_bytes
        if max_upload_bytes is not None
        else int(os.environ.get("MAX_UPLOAD_BYTES", DEFAULT_MAX_UPLOAD_BYTES))
    )
    store = Store(data_root)
    app = FastAPI(title="seqbox", docs_url=None, redoc_url=None)
    app.state.store = store
    # The browser explorer is served as static files from another origin.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def handle_api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.post("/datasets", status_code=201)
    async def create_dataset(request: Request) -> dict:
        body = await request.body()
        if len(body) > upload_limit:
            raise ApiError(413, "PayloadTooLarge", f"upload exceeds {upload_limit} bytes")
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            raise ApiError(400, "InvalidEncoding", "body must be UTF-8 CSV") from None
        try:
            return store.create_dataset(text)
        except IngestError as exc:
            raise ApiError(400, type(exc).__name__, str(exc)) from None

    @app.get("/datasets/{dataset_id}/summary")
    def dataset_summary(dataset_id: str) -> dict:
        return store.dataset_meta(dataset_id)["summary"]

    @app.post("/datasets/{dataset_id}/sessions", status_code=201)
    def create_session(dataset_id: str) -> dict:
        return store.create_session(dataset_id)

    @app.get("/sessions/{session_id}/overview")
    def get_overview(session_id: str) -> Response:
        document, _model = store.overview(session_id)
        return Response(content=document, media_type="application/json")

    @app.patch("/sessions/{session_id}")
    async def update_session(session_id: str, request: Request) -> dict:
        state = store.session_state(session_id)
        try:
            patch = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError:
            raise ApiError(422, "InvalidPatch", "patch body must be valid JSON") from None
        catalog = set(store.dataset_meta(state["dataset_id"])["event_types"])
        clean = validate_patch(patch, catalog)
        return store.apply_patch(session_id, clean)

    @app.get("/sessions/{session_id}/eventbox/{row}/{col}")
    def event_box_detail(session_id: str, row: int, col: int) -> dict:
        _document, model = store.overview(session_id)
        cell = model.document_cell(row, col)
        if cell is None:
            raise ApiError(404, "UnoccupiedCell", f"no event box at ({row}, {col})")
        model_row, position = cell
        box = model_row.boxes[position]
        return {
            "row": row,
            "column": col,
            "event_type": box.event_type,
            "count": box.count,
            "q": list(box.q),
            "fence": list(box.fence),
            "points": [
                {
                    "member": p.member_ref,
                    "duration": p.duration,
                    "occurrence": format_timestamp(p.occurrence),
                    "axis_pos": p.axis_pos,
                    "color_key": p.color_key,
                    "is_outlier": p.is_outlier,
                }
                for p in box.points
            ],
        }

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str) -> Response:
        store.delete_session(session_id)
        return Response(status_code=204)

    return app


def main() -> None:
    import uvicorn

    listen = os.environ.get("LISTEN_ADDR", DEFAULT_LISTEN_ADDR)
    host, _, port = listen.rpartition(":")
    uvicorn.run(create_app(), host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
