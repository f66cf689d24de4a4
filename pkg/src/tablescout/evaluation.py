"""Benchmark runner: graded NDCG@k plus wall-clock latency statistics.

NDCG uses the standard graded gain ``2^rel - 1`` with a ``log2(rank + 1)``
discount; the ideal ranking comes from the query's own judgments. Queries
without a single positive judgment score 0 and stay in the mean, which is
the conservative choice. Latency timers wrap engine.execute only: pool
loading and index construction are offline costs.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import TablescoutError
from .tables import Benchmark


@dataclass
class QueryOutcome:
    query_id: str
    ndcg5: float = 0.0
    ndcg10: float = 0.0
    latency_ms: float = 0.0
    error: str | None = None


@dataclass
class RunResult:
    per_query: list[QueryOutcome] = field(default_factory=list)
    mean_ndcg5: float = 0.0
    mean_ndcg10: float = 0.0
    latency_p50_ms: float | None = None
    latency_p95_ms: float | None = None
    latency_mean_ms: float | None = None

    def to_dict(self) -> dict:
        return {
            "mean_ndcg5": self.mean_ndcg5,
            "mean_ndcg10": self.mean_ndcg10,
            "latency_p50_ms": self.latency_p50_ms,
            "latency_p95_ms": self.latency_p95_ms,
            "latency_mean_ms": self.latency_mean_ms,
            "queries": [
                {
                    "query_id": q.query_id,
                    "ndcg5": q.ndcg5,
                    "ndcg10": q.ndcg10,
                    "latency_ms": q.latency_ms,
                    "error": q.error,
                }
                for q in self.per_query
            ],
        }


def ndcg_at_k(ranked_ids: list[str], qrels: dict[str, int], k: int) -> float:
    """Graded NDCG@k; 0.0 when the query has no positive judgment."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ideal = sorted((g for g in qrels.values() if g > 0), reverse=True)
    if not ideal:
        return 0.0
    dcg = 0.0
    for i, table_id in enumerate(ranked_ids[:k], start=1):
        rel = qrels.get(table_id, 0)
        if rel > 0:
            dcg += (2.0**rel - 1.0) / math.log2(i + 1)
    idcg = sum((2.0**rel - 1.0) / math.log2(i + 1) for i, rel in enumerate(ideal[:k], start=1))
    return dcg / idcg


def evaluate_run(engine, benchmark: Benchmark, parallel: bool = False) -> RunResult:
    """Execute every benchmark query and aggregate ranking/latency stats.

    Per-query failures are recorded, not fatal; the run only fails when every
    query fails. ``parallel`` fans queries out across threads for NDCG-only
    runs; latency stats are withheld there since timers would be contended.
    """
    outcomes: list[QueryOutcome] = []

    def run_one(q) -> QueryOutcome:
        qrels = benchmark.qrels_for(q.query_id)
        out = QueryOutcome(query_id=q.query_id or "")
        try:
            t0 = time.perf_counter()
            results = engine.execute(q)
            out.latency_ms = (time.perf_counter() - t0) * 1000.0
            ranked = [r.table_id for r in results]
            out.ndcg5 = ndcg_at_k(ranked, qrels, 5)
            out.ndcg10 = ndcg_at_k(ranked, qrels, 10)
        except Exception as exc:  # recorded, not fatal
            out.error = f"{type(exc).__name__}: {exc}"
        return out

    if parallel:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor() as pool:
            outcomes = list(pool.map(run_one, benchmark.queries))
    else:
        outcomes = [run_one(q) for q in benchmark.queries]

    ok = [o for o in outcomes if o.error is None]
    if benchmark.queries and not ok:
        raise TablescoutError("every benchmark query failed")

    result = RunResult(per_query=outcomes)
    if ok:
        result.mean_ndcg5 = float(np.mean([o.ndcg5 for o in ok]))
        result.mean_ndcg10 = float(np.mean([o.ndcg10 for o in ok]))
        if not parallel:
            lats = np.array([o.latency_ms for o in ok])
            result.latency_p50_ms = float(np.percentile(lats, 50))
            result.latency_p95_ms = float(np.percentile(lats, 95))
            result.latency_mean_ms = float(lats.mean())
    return result


def format_report(result: RunResult) -> str:
    lines = [f"{'query':<16} {'ndcg@5':>8} {'ndcg@10':>8} {'ms':>9}  error"]
    for q in result.per_query:
        err = q.error or ""
        lines.append(f"{q.query_id:<16} {q.ndcg5:>8.4f} {q.ndcg10:>8.4f} {q.latency_ms:>9.2f}  {err}")
    lines.append("-" * 48)
    lines.append(f"mean NDCG@5  : {result.mean_ndcg5:.4f}")
    lines.append(f"mean NDCG@10 : {result.mean_ndcg10:.4f}")
    if result.latency_mean_ms is not None:
        lines.append(f"latency mean : {result.latency_mean_ms:.2f} ms")
        lines.append(f"latency p50  : {result.latency_p50_ms:.2f} ms")
        lines.append(f"latency p95  : {result.latency_p95_ms:.2f} ms")
    return "\n".join(lines)


def write_report(result: RunResult, out_dir: str | Path) -> tuple[Path, Path]:
    """Emit the human-readable report and a machine-readable JSON next to it."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.txt"
    json_path = out_dir / "results.json"
    report_path.write_text(format_report(result) + "\n", encoding="utf-8")
    json_path.write_text(json.dumps(result.to_dict(), indent=2), encoding="utf-8")
    return report_path, json_path
