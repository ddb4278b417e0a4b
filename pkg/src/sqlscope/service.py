"""HTTP job service: dataset upload, discovery/summarize jobs, drill-down.

Datasets are content-addressed files under the state directory; job records
are JSON files plus an in-memory registry guarded by one lock. Jobs run on a
small FIFO worker pool over immutable table snapshots, so concurrent jobs
cannot interfere and identical specs yield identical payloads.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from fastapi import FastAPI, File, HTTPException, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from sqlscope.dataset_io import dumps_dataset, loads_dataset
from sqlscope.errors import ConfigError, SchemaError
from sqlscope.jobs import JobSpec, run_job, validate_job
from sqlscope.patterns import Pattern, extent_of
from sqlscope.quality import QualityMeasureSpec
from sqlscope.schema import Kind
from sqlscope.search import SearchConfig
from sqlscope.summarize import RuleListSummary, rule_membership
from sqlscope.table import BooleanColumn, DataTable, NominalColumn, NumericColumn


class DatasetStore:
    """Content-addressed dataset files with an in-memory table cache."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self._cache: dict[str, DataTable] = {}
        self._lock = threading.Lock()

    def save(self, csv_text: str, schema_text: str) -> str:
        digest = hashlib.sha256((schema_text + "\n" + csv_text).encode("utf-8")).hexdigest()[:16]
        csv_path = self.root / f"{digest}.csv"
        if not csv_path.exists():
            table = loads_dataset(csv_text, schema_text)  # validate before persisting
            csv_path.write_text(csv_text, encoding="utf-8")
            (self.root / f"{digest}.schema.json").write_text(schema_text, encoding="utf-8")
            with self._lock:
                self._cache[digest] = table
        return digest

    def save_table(self, table: DataTable) -> str:
        csv_text, schema_text = dumps_dataset(table)
        return self.save(csv_text, schema_text)

    def load(self, dataset_id: str) -> DataTable:
        with self._lock:
            if dataset_id in self._cache:
                return self._cache[dataset_id]
        csv_path = self.root / f"{dataset_id}.csv"
        schema_path = self.root / f"{dataset_id}.schema.json"
        if not csv_path.exists() or not schema_path.exists():
            raise KeyError(dataset_id)
        table = loads_dataset(
            csv_path.read_text(encoding="utf-8"), schema_path.read_text(encoding="utf-8")
        )
        with self._lock:
            self._cache[dataset_id] = table
        return table


class JobRecord:
    def __init__(self, job_id: str, spec: JobSpec):
        self.job_id = job_id
        self.spec = spec
        self.state = "queued"
        self.result: dict | None = None
        self.error: str | None = None
        self.created_at = time.time()
        self.started_at: float | None = None
        self.finished_at: float | None = None

    def to_json(self) -> dict:
        return {
            "job_id": self.job_id,
            "spec": self.spec.to_json(),
            "state": self.state,
            "result": self.result,
            "error": self.error,
            "created_at": self.created_at,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }

    @staticmethod
    def from_json(obj: dict) -> "JobRecord":
        record = JobRecord(obj["job_id"], JobSpec.from_json(obj["spec"]))
        record.state = obj["state"]
        record.result = obj.get("result")
        record.error = obj.get("error")
        record.created_at = obj.get("created_at", 0.0)
        record.started_at = obj.get("started_at")
        record.finished_at = obj.get("finished_at")
        return record


class JobRegistry:
    """Shared mutable job table; every transition happens under the lock and
    is flushed to disk before it becomes visible."""

    def __init__(self, root: Path, datasets: DatasetStore, workers: int = 2):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self.datasets = datasets
        self._records: dict[str, JobRecord] = {}
        self._lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=workers)

    def _persist(self, record: JobRecord) -> None:
        path = self.root / f"{record.job_id}.json"
        path.write_text(json.dumps(record.to_json(), ensure_ascii=False), encoding="utf-8")

    def submit(self, spec: JobSpec) -> str:
        job_id = uuid.uuid4().hex[:12]
        record = JobRecord(job_id, spec)
        with self._lock:
            self._records[job_id] = record
            self._persist(record)
        self._pool.submit(self._run, job_id)
        return job_id

    def _run(self, job_id: str) -> None:
        record = self.get(job_id)
        with self._lock:
            record.state = "running"
            record.started_at = time.time()
            self._persist(record)
        try:
            table = self.datasets.load(record.spec.dataset_id)
            result = run_job(record.spec, table)
            with self._lock:
                record.state = "done"
                record.result = result
                record.finished_at = time.time()
                self._persist(record)
        except Exception as exc:
            with self._lock:
                record.state = "failed"
                record.error = str(exc)
                record.finished_at = time.time()
                self._persist(record)

    def get(self, job_id: str) -> JobRecord:
        with self._lock:
            if job_id in self._records:
                return self._records[job_id]
        path = self.root / f"{job_id}.json"
        if not path.exists():
            raise KeyError(job_id)
        record = JobRecord.from_json(json.loads(path.read_text(encoding="utf-8")))
        with self._lock:
            self._records.setdefault(job_id, record)
            return self._records[job_id]

    def wait(self, job_id: str, timeout: float = 30.0) -> JobRecord:
        deadline = time.time() + timeout
        while time.time() < deadline:
            record = self.get(job_id)
            if record.state in ("done", "failed"):
                return record
            time.sleep(0.01)
        return self.get(job_id)


class MeasureModel(BaseModel):
    kind: str
    a: float = 1.0
    direction: str = "high"
    positive_class: str | None = None


class SearchModel(BaseModel):
    strategy: str = "beam"
    max_depth: int = 3
    beam_width: int | None = 50
    min_support: int | None = None
    top_k: int = 20
    diversity_jaccard: float = 0.8
    numeric_bins: int = 6


class RestrictModel(BaseModel):
    job_id: str
    subgroup: int


class JobSpecModel(BaseModel):
    dataset_id: str
    mode: str = "discover"
    target_attr: str | None = None
    measure: MeasureModel | None = None
    search: SearchModel = Field(default_factory=SearchModel)
    exclusions: list[str] = Field(default_factory=list)
    prediction_attr: str | None = None
    k: int = 3
    restrict_to: RestrictModel | None = None


class RefineModel(BaseModel):
    exclusions: list[str] | None = None
    restrict_to: int | None = None
    measure: MeasureModel | None = None


def _error(status: int, code: str, message: str, errors: list | None = None):
    payload = {"code": code, "message": message}
    if errors:
        payload["errors"] = errors
    return HTTPException(status_code=status, detail=payload)


def _subgroup_masks(record: JobRecord, table: DataTable) -> list[np.ndarray]:
    """Extents of a done job's subgroups (or first-match rule members)."""
    result = record.result or {}
    if record.spec.mode == "discover":
        return [
            extent_of(table, Pattern.from_json(g["selector_json"]))
            for g in result.get("subgroups", [])
        ]
    summary = RuleListSummary.from_json(result)
    membership = rule_membership(summary, table)
    return [membership == i for i in range(summary.k_produced)]


def create_app(state_dir: Path | str) -> FastAPI:
    state_dir = Path(state_dir)
    datasets = DatasetStore(state_dir / "datasets")
    jobs = JobRegistry(state_dir / "jobs", datasets)
    app = FastAPI(title="sqlscope", version="0.1.0")

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        errors = [
            {"field": ".".join(str(p) for p in e["loc"] if p != "body"), "message": e["msg"]}
            for e in exc.errors()
        ]
        return JSONResponse(
            status_code=422,
            content={"code": "validation_error", "message": "invalid request body", "errors": errors},
        )

    @app.exception_handler(HTTPException)
    async def on_http_error(request: Request, exc: HTTPException):
        detail = exc.detail
        if not isinstance(detail, dict):
            detail = {"code": "error", "message": str(detail)}
        return JSONResponse(status_code=exc.status_code, content=detail)

    def load_dataset_or_404(dataset_id: str) -> DataTable:
        try:
            return datasets.load(dataset_id)
        except (KeyError, SchemaError):
            raise _error(404, "dataset_not_found", f"no dataset {dataset_id!r}")

    def get_job_or_404(job_id: str) -> JobRecord:
        try:
            return jobs.get(job_id)
        except KeyError:
            raise _error(404, "job_not_found", f"no job {job_id!r}")

    def spec_from_model(body: JobSpecModel) -> JobSpec:
        measure = (
            QualityMeasureSpec(
                kind=body.measure.kind,
                a=body.measure.a,
                direction=body.measure.direction,
                positive_class=body.measure.positive_class,
            )
            if body.measure
            else QualityMeasureSpec(kind="wracc")
        )
        restrict = None
        dataset_id = body.dataset_id
        if body.restrict_to is not None:
            dataset_id = derive_restricted_dataset(body.restrict_to.job_id, body.restrict_to.subgroup)
            restrict = (body.restrict_to.job_id, body.restrict_to.subgroup)
        return JobSpec(
            dataset_id=dataset_id,
            mode=body.mode,
            target_attr=body.target_attr,
            measure=measure,
            search=SearchConfig(
                strategy=body.search.strategy,
                max_depth=body.search.max_depth,
                beam_width=body.search.beam_width,
                min_support=body.search.min_support,
                top_k=body.search.top_k,
                diversity_jaccard=body.search.diversity_jaccard,
                numeric_bins=body.search.numeric_bins,
            ),
            exclusions=frozenset(body.exclusions),
            prediction_attr=body.prediction_attr,
            k=body.k,
            restrict_to=restrict,
        )

    def derive_restricted_dataset(job_id: str, subgroup: int) -> str:
        record = get_job_or_404(job_id)
        if record.state != "done" or record.result is None:
            raise _error(422, "job_not_done", f"job {job_id!r} has no result to restrict to")
        table = load_dataset_or_404(record.spec.dataset_id)
        masks = _subgroup_masks(record, table)
        if not 0 <= subgroup < len(masks):
            raise _error(404, "subgroup_not_found", f"job {job_id!r} has no subgroup {subgroup}")
        return datasets.save_table(table.select_rows(masks[subgroup]))

    def submit_spec(spec: JobSpec) -> JSONResponse:
        table = load_dataset_or_404(spec.dataset_id)
        errors = validate_job(spec, table)
        if errors:
            fields = [
                {"field": e.split(":", 1)[0], "message": e.split(":", 1)[1].strip()}
                for e in errors
            ]
            raise _error(422, "invalid_spec", "job spec failed validation", fields)
        return JSONResponse({"job_id": jobs.submit(spec)})

    @app.post("/datasets")
    async def upload_dataset(csv: UploadFile = File(...), schema: UploadFile = File(...)):
        csv_text = (await csv.read()).decode("utf-8")
        schema_text = (await schema.read()).decode("utf-8")
        try:
            dataset_id = datasets.save(csv_text, schema_text)
        except (SchemaError, json.JSONDecodeError, ValueError) as exc:
            raise _error(422, "bad_dataset", str(exc))
        return {"dataset_id": dataset_id}

    @app.get("/datasets/{dataset_id}/schema")
    def dataset_schema(dataset_id: str):
        table = load_dataset_or_404(dataset_id)
        return {"attributes": table.schema.to_json(), "row_count": table.row_count}

    @app.get("/datasets/{dataset_id}/histogram")
    def dataset_histogram(
        dataset_id: str,
        attr: str,
        bins: int = 20,
        job: str | None = None,
        subgroup: int | None = None,
    ):
        table = load_dataset_or_404(dataset_id)
        if attr not in table.schema:
            raise _error(404, "attribute_not_found", f"no attribute {attr!r}")
        series_masks = {"all": table.all_rows_mask()}
        if job is not None and subgroup is not None:
            record = get_job_or_404(job)
            if record.state != "done":
                raise _error(422, "job_not_done", f"job {job!r} is {record.state}")
            masks = _subgroup_masks(record, table)
            if not 0 <= subgroup < len(masks):
                raise _error(404, "subgroup_not_found", f"no subgroup {subgroup}")
            series_masks = {"subgroup": masks[subgroup], "rest": ~masks[subgroup]}
        column = table.column(attr)
        if isinstance(column, NumericColumn):
            present = column.data[~np.isnan(column.data)]
            if len(present) == 0:
                raise _error(422, "no_values", f"attribute {attr!r} has no non-missing values")
            lo, hi = float(present.min()), float(present.max())
            if lo == hi:
                hi = lo + 1.0
            edges = np.linspace(lo, hi, bins + 1)
            counts = {}
            for name, mask in series_masks.items():
                values = column.data[mask]
                values = values[~np.isnan(values)]
                counts[name] = np.histogram(values, bins=edges)[0].astype(int).tolist()
            return {
                "attr": attr,
                "kind": "numeric",
                "edges": [float(e) for e in edges],
                "counts": counts,
            }
        if isinstance(column, NominalColumn):
            categories = list(column.values)
            counts = {
                name: np.bincount(column.codes[mask], minlength=len(categories)).astype(int).tolist()
                for name, mask in series_masks.items()
            }
            return {"attr": attr, "kind": "nominal", "categories": categories, "counts": counts}
        if isinstance(column, BooleanColumn):
            counts = {
                name: [
                    int(np.count_nonzero(~column.data[mask])),
                    int(np.count_nonzero(column.data[mask])),
                ]
                for name, mask in series_masks.items()
            }
            return {"attr": attr, "kind": "boolean", "categories": ["false", "true"], "counts": counts}
        raise _error(422, "unsupported_kind", "itemset attributes have no histogram")

    @app.post("/jobs")
    def create_job(body: JobSpecModel):
        return submit_spec(spec_from_model(body))

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        return get_job_or_404(job_id).to_json()

    @app.get("/jobs/{job_id}/subgroups/{index}/members")
    def subgroup_members(job_id: str, index: int, limit: int = 50):
        record = get_job_or_404(job_id)
        if record.state != "done" or record.result is None:
            raise _error(422, "job_not_done", f"job {job_id!r} is {record.state}")
        table = load_dataset_or_404(record.spec.dataset_id)
        masks = _subgroup_masks(record, table)
        if not 0 <= index < len(masks):
            raise _error(404, "subgroup_not_found", f"no subgroup {index}")
        row_ids = np.flatnonzero(masks[index])
        rows = [table.row_values(int(r)) for r in row_ids[: max(0, limit)]]
        return {"total": int(len(row_ids)), "rows": rows}

    @app.post("/jobs/{job_id}/refine")
    def refine_job(job_id: str, body: RefineModel):
        record = get_job_or_404(job_id)
        spec = record.spec
        dataset_id = spec.dataset_id
        restrict = spec.restrict_to
        if body.restrict_to is not None:
            dataset_id = derive_restricted_dataset(job_id, body.restrict_to)
            restrict = (job_id, body.restrict_to)
        measure = spec.measure
        if body.measure is not None:
            measure = QualityMeasureSpec(
                kind=body.measure.kind,
                a=body.measure.a,
                direction=body.measure.direction,
                positive_class=body.measure.positive_class,
            )
        exclusions = spec.exclusions
        if body.exclusions:
            exclusions = exclusions | frozenset(body.exclusions)
        child = JobSpec(
            dataset_id=dataset_id,
            mode=spec.mode,
            target_attr=spec.target_attr,
            measure=measure,
            search=spec.search,
            exclusions=exclusions,
            prediction_attr=spec.prediction_attr,
            k=spec.k,
            restrict_to=restrict,
        )
        return submit_spec(child)

    app.state.jobs = jobs
    app.state.datasets = datasets
    return app
