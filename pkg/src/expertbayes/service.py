"""HTTP/JSON facade: datasets, network versions, and background jobs.

Storage is content-addressed JSON files under the storage directory
(object ids are digests of canonical serializations), so identical
uploads are idempotent and service reports are byte-comparable with CLI
reports for the same inputs and seed. Jobs run FIFO on one background
worker thread; handlers never block on running jobs, and job execution
never mutates stored datasets or networks.
"""

from __future__ import annotations

import json
import queue
import threading
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .baselines import K2Config, learn_k2, learn_tan
from .data import Dataset, aligned_codes
from .errors import (
    ColumnMismatch,
    CycleWouldForm,
    EditInapplicable,
    ExpertBayesError,
    ParseError,
)
from .evaluation import (
    DEFAULT_THRESHOLDS,
    ExpertBayesSpec,
    K2Spec,
    OriginalSpec,
    TanSpec,
    cross_validate,
    make_folds,
    screen_correlations,
)
from .formats import (
    canonical_json,
    dataset_digest,
    dataset_summary,
    edit_from_document,
    eval_report_document,
    learn_report_document,
    load_dataset,
    network_digest,
    network_document,
    network_from_document,
    refine_report_document,
)
from .network import Network, apply_edit
from .refine import RefinementConfig, refine


class Store:
    """Content-addressed JSON records with atomic writes."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        for kind in ("datasets", "networks", "jobs"):
            (self.root / kind).mkdir(parents=True, exist_ok=True)
        self.lock = threading.Lock()

    def _path(self, kind: str, obj_id: str, suffix: str = ".json") -> Path:
        if not obj_id.replace("-", "").isalnum():
            raise HTTPException(404, f"unknown {kind[:-1]} id")
        return self.root / kind / f"{obj_id}{suffix}"

    def write(self, kind: str, obj_id: str, record: dict, suffix: str = ".json") -> None:
        path = self._path(kind, obj_id, suffix)
        tmp = path.with_name(path.name + ".tmp")
        with self.lock:
            tmp.write_text(canonical_json(record), encoding="utf-8")
            tmp.replace(path)

    def read(self, kind: str, obj_id: str, suffix: str = ".json") -> dict | None:
        path = self._path(kind, obj_id, suffix)
        with self.lock:
            if not path.exists():
                return None
            return json.loads(path.read_text(encoding="utf-8"))

    def require(self, kind: str, obj_id: str, suffix: str = ".json") -> dict:
        record = self.read(kind, obj_id, suffix)
        if record is None:
            raise HTTPException(404, f"unknown {kind[:-1]} id {obj_id!r}")
        return record

    def list_ids(self, kind: str) -> list[str]:
        with self.lock:
            names = sorted(
                p.name[: -len(".json")]
                for p in (self.root / kind).glob("*.json")
                if not p.name.endswith(".result.json")
            )
        return names

    def next_sequence(self) -> int:
        counter = self.root / "sequence"
        with self.lock:
            current = int(counter.read_text()) if counter.exists() else 0
            counter.write_text(str(current + 1))
        return current + 1


def _dataset_from_record(record: dict) -> Dataset:
    return load_dataset(
        record["csv"], record["class_column"], record["missing_token"]
    )


def _network_from_record(record: dict) -> Network:
    return network_from_document(record["document"])


def _check_compatible(network: Network, data: Dataset) -> None:
    try:
        aligned_codes(network.variables, data)
    except ColumnMismatch as e:
        raise HTTPException(422, str(e)) from None


async def _json_body(request: Request) -> Any:
    try:
        return json.loads(await request.body())
    except json.JSONDecodeError as e:
        raise HTTPException(400, f"malformed JSON body: {e.msg}") from None


def _job_config(body: dict) -> RefinementConfig:
    raw = body.get("config")
    if not isinstance(raw, dict):
        raise HTTPException(400, "field 'config' must be an object")
    try:
        return RefinementConfig(
            iterations=int(raw.get("iterations", 100)),
            seed=int(raw.get("seed", 0)),
            positive_state=str(raw["positive_state"]),
            threshold=float(raw.get("threshold", 0.5)),
            pseudocount=float(raw.get("pseudocount", 1.0)),
            redraw_rejected=bool(raw.get("redraw_rejected", False)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise HTTPException(400, f"invalid refinement config: {e}") from None


def create_app(storage_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    store = Store(storage_dir)
    jobs: "queue.Queue[str | None]" = queue.Queue()

    def update_job(job_id: str, **fields) -> dict:
        record = store.require("jobs", job_id)
        record.update(fields)
        store.write("jobs", job_id, record)
        return record

    def run_job(job_id: str) -> None:
        record = store.require("jobs", job_id)
        request = record["request"]
        update_job(job_id, state="running")

        def progress(done: int, total: int) -> None:
            update_job(job_id, progress={"done": done, "total": total})

        try:
            result = execute_job(request, progress)
        except ExpertBayesError as e:
            update_job(job_id, state="failed", error=str(e))
            return
        store.write("jobs", job_id, result, suffix=".result.json")
        update_job(job_id, state="done")

    def execute_job(request: dict, progress) -> dict:
        kind = request["kind"]
        if kind == "refine":
            net_record = store.require("networks", request["network"])
            network = _network_from_record(net_record)
            train_record = store.require("datasets", request["train"])
            train = _dataset_from_record(train_record)
            config = RefinementConfig(**request["config"])
            if request.get("test") is not None:
                test_record = store.require("datasets", request["test"])
                test = _dataset_from_record(test_record)
                run = refine(network, train, test, config, progress=progress)
                inputs = {
                    "network": request["network"],
                    "train": request["train"],
                    "test": request["test"],
                }
                return refine_report_document(run, inputs)
            plan = make_folds(train, int(request["folds"]), config.seed)
            report = cross_validate(
                [ExpertBayesSpec(network, config)],
                train,
                plan,
                DEFAULT_THRESHOLDS,
                positive_state=config.positive_state,
                cci_threshold=config.threshold,
                progress=progress,
            )
            inputs = {"network": request["network"], "data": request["train"]}
            return eval_report_document(report, inputs)
        if kind == "evaluate":
            data = _dataset_from_record(store.require("datasets", request["dataset"]))
            network = None
            inputs = {"data": request["dataset"]}
            if request.get("network"):
                network = _network_from_record(
                    store.require("networks", request["network"])
                )
                inputs["network"] = request["network"]
            specs = []
            config = request.get("config", {})
            pseudocount = float(config.get("pseudocount", 1.0))
            for name in request["learners"]:
                if name == "original":
                    specs.append(OriginalSpec(network, pseudocount))
                elif name == "expertbayes":
                    specs.append(
                        ExpertBayesSpec(
                            network,
                            RefinementConfig(
                                iterations=int(config.get("iterations", 100)),
                                seed=int(request.get("seed", 0)),
                                positive_state=str(request["positive_state"]),
                                threshold=float(config.get("threshold", 0.5)),
                                pseudocount=pseudocount,
                            ),
                        )
                    )
                elif name == "k2":
                    specs.append(
                        K2Spec(
                            K2Config(max_parents=int(config.get("max_parents", 1))),
                            pseudocount,
                        )
                    )
                else:
                    specs.append(TanSpec(pseudocount))
            plan = make_folds(data, int(request["folds"]), int(request.get("seed", 0)))
            report = cross_validate(
                specs,
                data,
                plan,
                DEFAULT_THRESHOLDS,
                positive_state=str(request["positive_state"]),
                cci_threshold=float(config.get("threshold", 0.5)),
                progress=progress,
            )
            return eval_report_document(report, inputs)
        if kind == "learn":
            data = _dataset_from_record(store.require("datasets", request["dataset"]))
            algorithm = request["algorithm"]
            pseudocount = float(request.get("pseudocount", 1.0))
            if algorithm == "k2":
                network = learn_k2(
                    data, K2Config(max_parents=int(request.get("max_parents", 1))), pseudocount
                )
            else:
                network = learn_tan(data, pseudocount)
            doc = network_document(network)
            network_id = network_digest(network)
            store.write("networks", network_id, {"document": doc, "parent": None})
            result = learn_report_document(network, algorithm, {"data": request["dataset"]})
            result["network_id"] = network_id
            return result
        raise ExpertBayesError(f"unknown job kind {kind!r}")

    def worker_loop() -> None:
        while True:
            job_id = jobs.get()
            if job_id is None:
                return
            try:
                run_job(job_id)
            except Exception as e:  # job crashes must not kill the worker
                try:
                    update_job(job_id, state="failed", error=f"internal error: {e}")
                except Exception:
                    pass

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        worker = threading.Thread(target=worker_loop, daemon=True)
        worker.start()
        # Re-queue jobs interrupted by a previous shutdown.
        for job_id in store.list_ids("jobs"):
            record = store.read("jobs", job_id)
            if record and record.get("state") in ("queued", "running"):
                update_job(job_id, state="queued")
                jobs.put(job_id)
        yield
        jobs.put(None)
        worker.join(timeout=5)

    app = FastAPI(title="expertbayes", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def schema_violations_are_400(_request: Request, exc: RequestValidationError):
        # 422 is reserved for dataset/network variable mismatches; malformed
        # requests are schema violations.
        first = exc.errors()[0] if exc.errors() else {}
        detail = f"{'.'.join(str(p) for p in first.get('loc', ()))}: {first.get('msg', 'invalid request')}"
        return JSONResponse(status_code=400, content={"error": "SchemaViolation", "detail": detail})

    # -- datasets ----------------------------------------------------------

    @app.post("/v1/datasets")
    async def post_dataset(request: Request, class_column: str, missing_token: str = "?"):
        body = await request.body()
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            raise HTTPException(400, "dataset body must be UTF-8 text") from None
        try:
            data = load_dataset(text, class_column, missing_token)
        except ParseError as e:
            raise HTTPException(400, str(e)) from None
        dataset_id = dataset_digest(data)
        if store.read("datasets", dataset_id) is None:
            store.write(
                "datasets",
                dataset_id,
                {
                    "csv": text,
                    "class_column": class_column,
                    "missing_token": missing_token,
                    "summary": dataset_summary(data),
                },
            )
        return {"id": dataset_id, "summary": dataset_summary(data)}

    @app.get("/v1/datasets")
    def list_datasets():
        out = []
        for dataset_id in store.list_ids("datasets"):
            record = store.require("datasets", dataset_id)
            out.append({"id": dataset_id, "summary": record["summary"]})
        return {"datasets": out}

    @app.get("/v1/datasets/{dataset_id}")
    def get_dataset(dataset_id: str):
        record = store.require("datasets", dataset_id)
        return {"id": dataset_id, "summary": record["summary"]}

    # -- networks ----------------------------------------------------------

    @app.post("/v1/networks")
    async def post_network(request: Request):
        doc = await _json_body(request)
        try:
            network = network_from_document(doc)
        except ParseError as e:
            raise HTTPException(400, str(e)) from None
        except ExpertBayesError as e:
            raise HTTPException(400, str(e)) from None
        network_id = network_digest(network)
        if store.read("networks", network_id) is None:
            store.write(
                "networks",
                network_id,
                {"document": network_document(network), "parent": None},
            )
        return {"id": network_id}

    @app.get("/v1/networks")
    def list_networks():
        out = []
        for network_id in store.list_ids("networks"):
            record = store.require("networks", network_id)
            doc = record["document"]
            out.append(
                {
                    "id": network_id,
                    "class_variable": doc["class_variable"],
                    "variables": [v["name"] for v in doc["variables"]],
                    "edge_count": len(doc.get("edges", [])),
                    "parent": record.get("parent"),
                }
            )
        return {"networks": out}

    @app.get("/v1/networks/{network_id}")
    def get_network(network_id: str):
        record = store.require("networks", network_id)
        return {
            "id": network_id,
            "parent": record.get("parent"),
            "document": record["document"],
        }

    @app.get("/v1/networks/{network_id}/chain")
    def get_network_chain(network_id: str):
        chain = []
        cursor: str | None = network_id
        while cursor is not None and cursor not in chain:
            record = store.require("networks", cursor)
            chain.append(cursor)
            cursor = record.get("parent")
        return {"chain": chain}

    @app.post("/v1/networks/{network_id}/edits")
    async def post_edit(network_id: str, request: Request):
        record = store.require("networks", network_id)
        network = _network_from_record(record)
        doc = await _json_body(request)
        try:
            edit = edit_from_document(doc, network.structure)
        except ParseError as e:
            raise HTTPException(400, str(e)) from None
        try:
            edited = apply_edit(network, edit)
        except EditInapplicable as e:
            return JSONResponse(
                status_code=409, content={"error": "EditInapplicable", "detail": str(e)}
            )
        except CycleWouldForm as e:
            return JSONResponse(
                status_code=409, content={"error": "CycleWouldForm", "detail": str(e)}
            )
        new_id = network_digest(edited)
        if store.read("networks", new_id) is None:
            store.write(
                "networks",
                new_id,
                {"document": network_document(edited), "parent": network_id},
            )
        return {"id": new_id, "parent": network_id}

    @app.get("/v1/networks/{network_id}/screen")
    def get_screen(network_id: str, dataset: str, threshold: float = 0.9):
        record = store.require("networks", network_id)
        network = _network_from_record(record)
        data = _dataset_from_record(store.require("datasets", dataset))
        _check_compatible(network, data)
        names = {v.name for v in network.variables} | {data.class_column}
        keep = [i for i, c in enumerate(data.columns) if c.name in names]
        projected = Dataset(
            tuple(data.columns[i] for i in keep),
            tuple(tuple(row[i] for i in keep) for row in data.rows),
            data.class_column,
        )
        flags = screen_correlations(projected, threshold)
        return {
            "threshold": threshold,
            "warnings": [{"a": f.a, "b": f.b, "score": f.score} for f in flags],
        }

    # -- jobs ----------------------------------------------------------------

    def _validate_job(body: Any) -> dict:
        if not isinstance(body, dict):
            raise HTTPException(400, "job request must be a JSON object")
        kind = body.get("kind")
        if kind not in ("refine", "evaluate", "learn"):
            raise HTTPException(400, f"unknown job kind {kind!r}")
        if kind == "refine":
            config = _job_config(body)
            network = _network_from_record(
                store.require("networks", str(body.get("network")))
            )
            train = _dataset_from_record(
                store.require("datasets", str(body.get("train")))
            )
            _check_compatible(network, train)
            request: dict[str, Any] = {
                "kind": "refine",
                "network": str(body["network"]),
                "train": str(body["train"]),
                "config": {
                    "iterations": config.iterations,
                    "seed": config.seed,
                    "positive_state": config.positive_state,
                    "threshold": config.threshold,
                    "pseudocount": config.pseudocount,
                    "redraw_rejected": config.redraw_rejected,
                },
            }
            if body.get("test") is not None:
                test = _dataset_from_record(
                    store.require("datasets", str(body.get("test")))
                )
                _check_compatible(network, test)
                request["test"] = str(body["test"])
                total = config.iterations
            elif body.get("folds") is not None:
                folds = int(body["folds"])
                if folds < 2:
                    raise HTTPException(400, "folds must be >= 2")
                request["folds"] = folds
                total = folds
            else:
                raise HTTPException(400, "refine jobs need 'test' or 'folds'")
            request["total"] = total
            return request
        if kind == "evaluate":
            learners = body.get("learners")
            known = {"original", "expertbayes", "k2", "tan"}
            if (
                not isinstance(learners, list)
                or not learners
                or any(l not in known for l in learners)
                or len(set(learners)) != len(learners)
            ):
                raise HTTPException(400, f"learners must be a nonempty subset of {sorted(known)}")
            data = _dataset_from_record(
                store.require("datasets", str(body.get("dataset")))
            )
            if body.get("positive_state") is None:
                raise HTTPException(400, "field 'positive_state' is required")
            folds = int(body.get("folds", 5))
            if folds < 2:
                raise HTTPException(400, "folds must be >= 2")
            network_id = body.get("network")
            if {"original", "expertbayes"} & set(learners):
                if network_id is None:
                    raise HTTPException(400, "original/expertbayes learners need 'network'")
                network = _network_from_record(store.require("networks", str(network_id)))
                _check_compatible(network, data)
            request = {
                "kind": "evaluate",
                "dataset": str(body["dataset"]),
                "learners": list(learners),
                "folds": folds,
                "seed": int(body.get("seed", 0)),
                "positive_state": str(body["positive_state"]),
                "config": dict(body.get("config") or {}),
            }
            if network_id is not None:
                request["network"] = str(network_id)
            request["total"] = folds * len(learners)
            return request
        # learn
        algorithm = body.get("algorithm")
        if algorithm not in ("k2", "tan"):
            raise HTTPException(400, f"unknown algorithm {algorithm!r}")
        _dataset_from_record(store.require("datasets", str(body.get("dataset"))))
        return {
            "kind": "learn",
            "dataset": str(body["dataset"]),
            "algorithm": algorithm,
            "max_parents": int(body.get("max_parents", 1)),
            "pseudocount": float(body.get("pseudocount", 1.0)),
        }

    @app.post("/v1/jobs", status_code=202)
    async def post_job(request: Request):
        body = await _json_body(request)
        job_request = _validate_job(body)
        seq = store.next_sequence()
        job_id = f"job-{seq:06d}"
        record = {
            "id": job_id,
            "kind": job_request["kind"],
            "state": "queued",
            "progress": {"done": 0, "total": job_request.get("total", 1)},
            "error": None,
            "request": job_request,
        }
        store.write("jobs", job_id, record)
        jobs.put(job_id)
        return {"id": job_id}

    @app.get("/v1/jobs")
    def list_jobs():
        out = []
        for job_id in store.list_ids("jobs"):
            record = store.require("jobs", job_id)
            out.append(
                {
                    "id": record["id"],
                    "kind": record["kind"],
                    "state": record["state"],
                    "progress": record["progress"],
                    "error": record["error"],
                }
            )
        return {"jobs": out}

    @app.get("/v1/jobs/{job_id}")
    def get_job(job_id: str):
        return store.require("jobs", job_id)

    @app.get("/v1/jobs/{job_id}/result")
    def get_job_result(job_id: str):
        record = store.require("jobs", job_id)
        if record["state"] != "done":
            raise HTTPException(404, f"job is {record['state']}; no result yet")
        return store.require("jobs", job_id, suffix=".result.json")

    @app.get("/v1/jobs/{job_id}/pr")
    def get_job_pr(job_id: str):
        record = store.require("jobs", job_id)
        if record["state"] != "done":
            raise HTTPException(404, f"job is {record['state']}; no result yet")
        result = store.require("jobs", job_id, suffix=".result.json")
        if "learners" not in result:
            raise HTTPException(404, "this job kind has no PR series")
        return {
            "thresholds": result["thresholds"],
            "series": [
                {"name": lr["name"], "pr": lr["pr"]} for lr in result["learners"]
            ],
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
