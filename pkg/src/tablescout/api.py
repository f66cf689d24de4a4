"""HTTP service: pool ingestion, indexing, search, explanation, processing
previews, assistant routing and async train/evaluate jobs.

Error mapping: validation problems are 400, unknown ids 404, searching an
unindexed pool (or racing an exclusive build) 409, an unreachable embedding
provider 503. Search is synchronous to honor the latency target; train and
evaluate run as polled jobs. A freshly created pool starts with a neutral
condition scorer (head output pinned to 0) so rankings equal the pure
table-score ordering until a model is trained or uploaded.
"""

from __future__ import annotations

import itertools
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import errors as err
from .assistant import LlmConfig, route_intent
from .condition_model import FusionModel
from .embedding import EmbeddedPool, EmbeddingProviderConfig, Provider, embed_pool, make_provider
from .engine import Engine, EngineConfig, ScoredTable
from .evaluation import evaluate_run
from .hnsw import HnswIndex, HnswParams, IndexEntry, build
from .matching import union_score
from .processing import join_preview, union_preview
from .tables import (
    QueryMode,
    QuerySpec,
    TablePool,
    TableRecord,
    load_benchmark,
    load_pool,
    parse_table_text,
)
from .training import TrainConfig, build_training_set, load_checkpoint, train

_BAD_REQUEST = (
    err.MissingConditionError,
    err.MissingKeyColumnError,
    err.MissingQueryTableError,
    err.UnknownColumnError,
    err.RaggedTableError,
    err.EmptyTableError,
    err.EmptyPoolError,
    err.DuplicateIdError,
    err.GradeOutOfRangeError,
    err.DanglingQrelError,
    err.EmptyCandidateError,
    err.EmptyBatchError,
)
_NOT_FOUND = (err.UnknownPoolError, err.UnknownTableError)
_CONFLICT = (err.IndexNotReadyError,)
_UNAVAILABLE = (err.ProviderUnavailableError,)


def neutral_model(embed_dim: int, hidden_dim: int = 128, seed: int = 0) -> FusionModel:
    """Seeded init with the head's output layer zeroed: condition score is
    exactly 0 until trained, so an untrained pool ranks by table score."""
    model = FusionModel.initialize(embed_dim=embed_dim, hidden_dim=hidden_dim, seed=seed)
    w, b = model.head.layers[-1]
    w[:] = 0.0
    b[:] = 0.0
    return model


@dataclass
class PoolState:
    pool: TablePool
    embedded: EmbeddedPool | None = None
    index: HnswIndex | None = None
    model: FusionModel | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def engine(self, provider: Provider, config: EngineConfig) -> Engine:
        if self.embedded is None or self.index is None:
            raise err.IndexNotReadyError(f"pool {self.pool.pool_id!r} is not indexed yet")
        return Engine(pool=self.embedded, index=self.index, model=self.model, provider=provider, config=config)


@dataclass
class Job:
    job_id: str
    kind: str
    status: str = "pending"  # pending | running | done | failed
    result: dict | None = None
    error: str | None = None


class ServiceState:
    def __init__(self, provider: Provider, llm_config: LlmConfig | None = None):
        self.provider = provider
        self.llm_config = llm_config
        self.pools: dict[str, PoolState] = {}
        self.jobs: dict[str, Job] = {}
        self._pool_counter = itertools.count(1)

    def pool(self, pool_id: str) -> PoolState:
        state = self.pools.get(pool_id)
        if state is None:
            raise err.UnknownPoolError(f"no pool {pool_id!r}")
        return state

    def new_pool_id(self) -> str:
        return f"pool-{next(self._pool_counter)}"

    def spawn(self, kind: str, work) -> Job:
        job = Job(job_id=uuid.uuid4().hex[:12], kind=kind)
        self.jobs[job.job_id] = job

        def runner():
            job.status = "running"
            try:
                job.result = work()
                job.status = "done"
            except Exception as exc:
                job.error = f"{type(exc).__name__}: {exc}"
                job.status = "failed"

        threading.Thread(target=runner, daemon=True).start()
        return job


# --- request bodies --------------------------------------------------------


class InlineTable(BaseModel):
    id: str
    csv: str
    caption: str = ""
    description: str = ""


class CreatePoolRequest(BaseModel):
    pool_id: str | None = None
    dir: str | None = None
    tables: list[InlineTable] | None = None


class IndexRequest(BaseModel):
    m: int = 16
    ef_construction: int = 200
    ef_search: int = 64
    seed: int = 0


class SearchRequest(BaseModel):
    mode: str
    condition: str | None = None
    query_table: str | None = None  # inline CSV text
    query_table_id: str | None = None  # or reference a pool table
    key_column: str | None = None
    k: int = 10
    lambda_: float | None = None
    n_candidates: int = 100

    model_config = {"populate_by_name": True}

    def __init__(self, **data: Any):
        if "lambda" in data:  # wire name is "lambda"
            data["lambda_"] = data.pop("lambda")
        super().__init__(**data)


class AssistantRequest(BaseModel):
    text: str


class ProcessRequest(BaseModel):
    pool_id: str
    op: str  # union_preview | join_preview
    left_table_id: str | None = None
    left_csv: str | None = None
    right_table_id: str
    left_key: str | None = None
    right_key: str | None = None


class TrainRequest(BaseModel):
    pool_id: str
    benchmark_dir: str
    epochs: int = 20
    learning_rate: float = 1e-3
    batch_size: int = 8
    negatives_per_query: int = 32
    seed: int = 0
    optimize_lambda: bool = False
    hidden_dim: int = 128


class EvaluateRequest(BaseModel):
    pool_id: str
    benchmark_dir: str


# --- app factory ------------------------------------------------------------


def _table_json(table: TableRecord, max_rows: int = 50) -> dict:
    return {
        "table_id": table.id,
        "columns": table.column_names(),
        "rows": table.rows(max_rows),
        "row_count": table.row_count,
        "caption": table.metadata.caption,
        "description": table.metadata.description,
    }


def _scored_json(st: ScoredTable, caption: str = "") -> dict:
    return {
        "table_id": st.table_id,
        "rho": st.score,
        "rho_t": st.table_score,
        "rho_c": st.condition_score,
        "join_column": st.join_column,
        "matching": (
            [{"query_column": q, "candidate_column": c, "weight": w} for q, c, w in st.matching]
            if st.matching is not None
            else None
        ),
        "caption": caption,
    }


def _query_spec(state: PoolState, req: SearchRequest) -> QuerySpec:
    table = None
    if req.query_table is not None:
        table = parse_table_text("query", req.query_table)
    elif req.query_table_id is not None:
        table = state.pool.get(req.query_table_id)
        if table is None:
            raise err.UnknownTableError(f"no table {req.query_table_id!r} in pool")
    try:
        mode = QueryMode(req.mode)
    except ValueError:
        raise err.MissingConditionError(f"unknown mode {req.mode!r}") from None
    return QuerySpec(mode=mode, query_table=table, condition=req.condition, key_column=req.key_column, k=req.k)


def create_app(
    provider_config: EmbeddingProviderConfig | None = None,
    llm_config: LlmConfig | None = None,
    preload_dir: str | None = None,
    preload_pool_id: str = "default",
) -> FastAPI:
    state = ServiceState(provider=make_provider(provider_config or EmbeddingProviderConfig()), llm_config=llm_config)
    app = FastAPI(title="tablescout", version="0.1.0")
    app.state.service = state

    @app.exception_handler(err.TablescoutError)
    async def _map_errors(_: Request, exc: err.TablescoutError):
        if isinstance(exc, _BAD_REQUEST):
            code = 400
        elif isinstance(exc, _NOT_FOUND):
            code = 404
        elif isinstance(exc, _CONFLICT):
            code = 409
        elif isinstance(exc, _UNAVAILABLE):
            code = 503
        else:
            code = 500
        return JSONResponse(status_code=code, content={"error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _map_value_errors(_: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": "ValueError", "detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "provider_dim": state.provider.dim}

    @app.get("/pools")
    def list_pools():
        return {
            "pools": [
                {
                    "pool_id": pid,
                    "num_tables": len(ps.pool),
                    "indexed": ps.index is not None,
                }
                for pid, ps in state.pools.items()
            ]
        }

    @app.post("/pools", status_code=201)
    def create_pool(req: CreatePoolRequest):
        if bool(req.dir) == bool(req.tables):
            raise ValueError("provide exactly one of 'dir' or 'tables'")
        if req.dir:
            path = Path(req.dir)
            if not path.is_dir():
                raise err.UnknownPoolError(f"directory {req.dir!r} does not exist")
            pool = load_pool(path)
        else:
            pool = TablePool(pool_id="inline")
            for t in req.tables:
                pool.add(parse_table_text(t.id, t.csv, t.caption, t.description))
        pool_id = req.pool_id or state.new_pool_id()
        if pool_id in state.pools:
            raise err.DuplicateIdError(f"pool {pool_id!r} already exists")
        pool.pool_id = pool_id
        state.pools[pool_id] = PoolState(pool=pool, model=neutral_model(state.provider.dim))
        return {"pool_id": pool_id, "num_tables": len(pool)}

    @app.post("/pools/{pool_id}/index")
    def build_index(pool_id: str, req: IndexRequest | None = None):
        ps = state.pool(pool_id)
        req = req or IndexRequest()
        if not ps.lock.acquire(blocking=False):
            raise err.IndexNotReadyError(f"pool {pool_id!r} has an exclusive build/train running")
        try:
            t0 = time.perf_counter()
            ps.embedded = embed_pool(state.provider, ps.pool)
            entries = [IndexEntry(t.table_id, t.concatenated) for t in ps.embedded.tables.values()]
            ps.index = build(
                entries,
                HnswParams(m=req.m, ef_construction=req.ef_construction, ef_search=req.ef_search, seed=req.seed),
            )
            ms = (time.perf_counter() - t0) * 1000.0
        finally:
            ps.lock.release()
        return {"status": "built", "num_entries": len(ps.index), "build_ms": ms}

    @app.get("/pools/{pool_id}/tables/{table_id}")
    def table_preview(pool_id: str, table_id: str):
        ps = state.pool(pool_id)
        table = ps.pool.get(table_id)
        if table is None:
            raise err.UnknownTableError(f"no table {table_id!r} in pool {pool_id!r}")
        return _table_json(table)

    @app.post("/pools/{pool_id}/search")
    def search(pool_id: str, req: SearchRequest):
        ps = state.pool(pool_id)
        spec = _query_spec(ps, req)
        config = EngineConfig(n_candidates=req.n_candidates, table_weight=req.lambda_)
        engine = ps.engine(state.provider, config)
        t0 = time.perf_counter()
        results = engine.execute(spec)
        ms = (time.perf_counter() - t0) * 1000.0
        payload = []
        for st in results:
            table = ps.pool.get(st.table_id)
            payload.append(_scored_json(st, caption=table.metadata.caption if table else ""))
        return {"results": payload, "latency_ms": ms, "mode": spec.mode.value}

    @app.post("/pools/{pool_id}/explain/{table_id}")
    def explain(pool_id: str, table_id: str, req: SearchRequest):
        ps = state.pool(pool_id)
        spec = _query_spec(ps, req)
        config = EngineConfig(n_candidates=req.n_candidates, table_weight=req.lambda_)
        engine = ps.engine(state.provider, config)
        st = engine.explain(spec, table_id)
        table = ps.pool.get(table_id)
        return _scored_json(st, caption=table.metadata.caption if table else "")

    @app.post("/assistant/message")
    def assistant_message(req: AssistantRequest):
        turn = route_intent(req.text, state.llm_config)
        return {
            "text": turn.text,
            "detected_intent": turn.detected_intent,
            "extracted": (
                {
                    "mode": turn.extracted.mode.value,
                    "condition": turn.extracted.condition,
                    "key_column": turn.extracted.key_column,
                }
                if turn.extracted
                else None
            ),
            "reply": turn.reply,
        }

    @app.post("/process")
    def process(req: ProcessRequest):
        ps = state.pool(req.pool_id)
        right = ps.pool.get(req.right_table_id)
        if right is None:
            raise err.UnknownTableError(f"no table {req.right_table_id!r} in pool")
        if req.left_csv is not None:
            left = parse_table_text("upload", req.left_csv)
        elif req.left_table_id is not None:
            left = ps.pool.get(req.left_table_id)
            if left is None:
                raise err.UnknownTableError(f"no table {req.left_table_id!r} in pool")
        else:
            raise ValueError("provide left_csv or left_table_id")

        if req.op == "union_preview":
            from .embedding import embed_table

            left_emb = embed_table(state.provider, left)
            right_emb = ps.embedded.get(right.id) if ps.embedded else embed_table(state.provider, right)
            ts = union_score(left_emb.column_vectors, right_emb.column_vectors)
            pairs = [(left_emb.column_names[i], right_emb.column_names[j]) for i, j, _ in ts.matching]
            preview = union_preview(left, right, pairs)
        elif req.op == "join_preview":
            if not (req.left_key and req.right_key):
                raise err.MissingKeyColumnError("join_preview needs left_key and right_key")
            preview = join_preview(left, right, req.left_key, req.right_key)
        else:
            raise ValueError(f"unknown op {req.op!r}")
        return _table_json(preview, max_rows=200)

    @app.post("/train", status_code=202)
    def train_job(req: TrainRequest):
        ps = state.pool(req.pool_id)
        if ps.embedded is None:
            raise err.IndexNotReadyError(f"pool {req.pool_id!r} must be indexed before training")
        if not ps.lock.acquire(blocking=False):
            raise err.IndexNotReadyError(f"pool {req.pool_id!r} has an exclusive build/train running")

        def work():
            try:
                benchmark = load_benchmark(req.benchmark_dir)
                examples = build_training_set(
                    ps.embedded, benchmark, state.provider,
                    negatives_per_query=req.negatives_per_query, seed=req.seed,
                )
                model = FusionModel.initialize(
                    embed_dim=state.provider.dim, hidden_dim=req.hidden_dim, seed=req.seed
                )
                config = TrainConfig(
                    learning_rate=req.learning_rate,
                    epochs=req.epochs,
                    batch_size=req.batch_size,
                    negatives_per_query=req.negatives_per_query,
                    seed=req.seed,
                    optimize_table_weight=req.optimize_lambda,
                )
                model, curve = train(model, examples, config)
                ps.model = model
                return {"epochs": len(curve), "initial_loss": curve[0], "final_loss": curve[-1]}
            finally:
                ps.lock.release()

        job = state.spawn("train", work)
        return {"job_id": job.job_id}

    @app.post("/evaluate", status_code=202)
    def evaluate_job(req: EvaluateRequest):
        ps = state.pool(req.pool_id)
        engine = ps.engine(state.provider, EngineConfig())

        def work():
            benchmark = load_benchmark(req.benchmark_dir)
            result = evaluate_run(engine, benchmark)
            return result.to_dict()

        job = state.spawn("evaluate", work)
        return {"job_id": job.job_id}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        job = state.jobs.get(job_id)
        if job is None:
            raise err.UnknownTableError(f"no job {job_id!r}")
        return {"job_id": job.job_id, "kind": job.kind, "status": job.status, "result": job.result, "error": job.error}

    if preload_dir:
        pool = load_pool(preload_dir)
        pool.pool_id = preload_pool_id
        ps = PoolState(pool=pool, model=neutral_model(state.provider.dim))
        state.pools[preload_pool_id] = ps
        ps.embedded = embed_pool(state.provider, pool)
        entries = [IndexEntry(t.table_id, t.concatenated) for t in ps.embedded.tables.values()]
        ps.index = build(entries, HnswParams())
        ckpt = Path(preload_dir) / "model.ckpt"
        if ckpt.exists():
            ps.model = load_checkpoint(ckpt)

    return app
