"""Command-line entry points mirroring the HTTP operations.

Exit codes: 2 for validation problems, 3 for file/format problems, 4 when
the embedding provider is unreachable, 1 for anything else that went wrong.
"""

from __future__ import annotations

import functools
import sys
import time
from pathlib import Path

import click

from . import errors as err
from .api import create_app, neutral_model
from .assistant import LlmConfig
from .embedding import (
    EmbeddingProviderConfig,
    ProviderKind,
    embed_pool,
    load_embedded_pool,
    save_embedded_pool,
)
from .engine import Engine, EngineConfig
from .evaluation import evaluate_run, format_report, write_report
from .hnsw import HnswParams, IndexEntry, build
from .hnsw import load as load_index
from .hnsw import save as save_index
from .tables import QueryMode, QuerySpec, load_benchmark, load_pool, parse_table_csv
from .training import TrainConfig, build_training_set, load_checkpoint, save_checkpoint, train

_VALIDATION = (
    err.MissingConditionError,
    err.MissingKeyColumnError,
    err.MissingQueryTableError,
    err.UnknownColumnError,
    err.UnknownTableError,
    err.RaggedTableError,
    err.EmptyTableError,
    err.EmptyPoolError,
    err.DuplicateIdError,
    err.GradeOutOfRangeError,
    err.DanglingQrelError,
    ValueError,
)
_FILEISH = (
    FileNotFoundError,
    err.CorruptIndexError,
    err.CorruptCheckpointError,
    err.UnsupportedVersionError,
)


def _exits(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _VALIDATION as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(2)
        except _FILEISH as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(3)
        except err.ProviderUnavailableError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(4)
        except err.TablescoutError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _provider(dim: int, seed: int, kind: str = "hashing", endpoint: str | None = None):
    from .embedding import make_provider

    return make_provider(
        EmbeddingProviderConfig(kind=ProviderKind(kind), dim=dim, seed=seed, endpoint=endpoint)
    )


def _load_or_build(pool_dir: str, index_dir: str | None, provider):
    pool = load_pool(pool_dir)
    if index_dir and (Path(index_dir) / "index.bin").exists():
        embedded = load_embedded_pool(Path(index_dir) / "embeddings.npz")
        index = load_index(Path(index_dir) / "index.bin")
        if index.dim != 2 * provider.dim:
            raise err.DimMismatchError(
                f"index dim {index.dim} does not match provider dim {provider.dim} (expected {2 * provider.dim})"
            )
        return pool, embedded, index
    embedded = embed_pool(provider, pool)
    entries = [IndexEntry(t.table_id, t.concatenated) for t in embedded.tables.values()]
    return pool, embedded, build(entries, HnswParams())


@click.group()
def main():
    """Conditional table discovery over CSV pools."""


@main.command()
@click.argument("pool_dir", type=click.Path(exists=True, file_okay=False))
@_exits
def ingest(pool_dir):
    """Validate a pool directory and report its size."""
    pool = load_pool(pool_dir)
    rows = sum(t.row_count for t in pool)
    click.echo(f"pool {pool.pool_id!r}: {len(pool)} tables, {rows} rows total")


@main.command()
@click.argument("pool_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False), help="index artifact directory")
@click.option("--dim", default=256, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--m", default=16, show_default=True)
@click.option("--ef-construction", default=200, show_default=True)
@click.option("--ef-search", default=64, show_default=True)
@_exits
def index(pool_dir, out, dim, seed, m, ef_construction, ef_search):
    """Embed a pool and build its ANN index."""
    provider = _provider(dim, seed)
    pool = load_pool(pool_dir)
    t0 = time.perf_counter()
    embedded = embed_pool(provider, pool)
    entries = [IndexEntry(t.table_id, t.concatenated) for t in embedded.tables.values()]
    idx = build(entries, HnswParams(m=m, ef_construction=ef_construction, ef_search=ef_search, seed=seed))
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_index(idx, out_dir / "index.bin")
    save_embedded_pool(embedded, out_dir / "embeddings.npz")
    click.echo(f"indexed {len(idx)} tables in {time.perf_counter() - t0:.1f}s -> {out_dir}")


@main.command()
@click.argument("pool_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--mode", type=click.Choice([m.value for m in QueryMode]), required=True)
@click.option("--table", "table_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--condition", default=None)
@click.option("--key-column", default=None)
@click.option("--k", default=10, show_default=True)
@click.option("--lambda", "lambda_", type=float, default=None, help="table-score weighting override")
@click.option("--n-candidates", default=100, show_default=True)
@click.option("--index", "index_dir", type=click.Path(file_okay=False), default=None)
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--dim", default=256, show_default=True)
@click.option("--seed", default=0, show_default=True)
@_exits
def search(pool_dir, mode, table_path, condition, key_column, k, lambda_, n_candidates, index_dir,
           model_path, dim, seed):
    """Run one query and print the ranked results."""
    provider = _provider(dim, seed)
    pool, embedded, idx = _load_or_build(pool_dir, index_dir, provider)
    model = load_checkpoint(model_path) if model_path else neutral_model(provider.dim)
    spec = QuerySpec(
        mode=QueryMode(mode),
        query_table=parse_table_csv(table_path) if table_path else None,
        condition=condition,
        key_column=key_column,
        k=k,
    )
    engine = Engine(
        pool=embedded,
        index=idx,
        model=model,
        provider=provider,
        config=EngineConfig(n_candidates=n_candidates, table_weight=lambda_),
    )
    t0 = time.perf_counter()
    results = engine.execute(spec)
    ms = (time.perf_counter() - t0) * 1000.0

    def fmt(x):
        return f"{x:.4f}" if x is not None else "     -"

    click.echo(f"{'rank':<5} {'table':<24} {'score':>8} {'tbl':>8} {'cond':>8}  caption")
    for rank, st in enumerate(results, start=1):
        caption = ""
        record = pool.get(st.table_id)
        if record is not None:
            caption = record.metadata.caption
        click.echo(
            f"{rank:<5} {st.table_id:<24} {st.score:>8.4f} {fmt(st.table_score):>8} "
            f"{fmt(st.condition_score):>8}  {caption}"
        )
    click.echo(f"({len(results)} results in {ms:.1f} ms)")


@main.command()
@click.argument("pool_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--benchmark", "benchmark_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--epochs", default=20, show_default=True)
@click.option("--lr", default=1e-3, show_default=True)
@click.option("--batch-size", default=8, show_default=True)
@click.option("--negatives", default=32, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--hidden-dim", default=128, show_default=True)
@click.option("--optimize-lambda", is_flag=True, default=False)
@click.option("--index", "index_dir", type=click.Path(file_okay=False), default=None)
@click.option("--dim", default=256, show_default=True)
@_exits
def train_cmd(pool_dir, benchmark_dir, out_path, epochs, lr, batch_size, negatives, seed, hidden_dim,
              optimize_lambda, index_dir, dim):
    """Fit the condition scorer on a benchmark and write a checkpoint."""
    provider = _provider(dim, seed)
    _, embedded, _ = _load_or_build(pool_dir, index_dir, provider)
    benchmark = load_benchmark(benchmark_dir)
    examples = build_training_set(embedded, benchmark, provider, negatives_per_query=negatives, seed=seed)
    from .condition_model import FusionModel

    model = FusionModel.initialize(embed_dim=provider.dim, hidden_dim=hidden_dim, seed=seed)
    config = TrainConfig(
        learning_rate=lr,
        epochs=epochs,
        batch_size=batch_size,
        negatives_per_query=negatives,
        seed=seed,
        optimize_table_weight=optimize_lambda,
    )
    model, curve = train(model, examples, config)
    save_checkpoint(model, out_path)
    click.echo(f"trained {epochs} epochs: loss {curve[0]:.5f} -> {curve[-1]:.5f}; saved {out_path}")


main.add_command(train_cmd, name="train")


@main.command(name="eval")
@click.argument("pool_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--benchmark", "benchmark_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--index", "index_dir", type=click.Path(file_okay=False), default=None)
@click.option("--report-dir", type=click.Path(file_okay=False), default=None)
@click.option("--dim", default=256, show_default=True)
@click.option("--seed", default=0, show_default=True)
@_exits
def eval_cmd(pool_dir, benchmark_dir, model_path, index_dir, report_dir, dim, seed):
    """Run a benchmark and print the NDCG/latency report."""
    provider = _provider(dim, seed)
    _, embedded, idx = _load_or_build(pool_dir, index_dir, provider)
    model = load_checkpoint(model_path) if model_path else neutral_model(provider.dim)
    engine = Engine(pool=embedded, index=idx, model=model, provider=provider, config=EngineConfig())
    benchmark = load_benchmark(benchmark_dir)
    result = evaluate_run(engine, benchmark)
    click.echo(format_report(result))
    if report_dir:
        paths = write_report(result, report_dir)
        click.echo(f"wrote {paths[0]} and {paths[1]}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
@click.option("--provider", "provider_kind", type=click.Choice(["hashing", "remote"]),
              default="hashing", show_default=True, envvar="TABLESCOUT_PROVIDER")
@click.option("--dim", default=256, show_default=True, envvar="TABLESCOUT_DIM")
@click.option("--seed", default=0, show_default=True)
@click.option("--endpoint", default=None, envvar="TABLESCOUT_EMBED_ENDPOINT",
              help="remote embed endpoint URL")
@click.option("--llm-endpoint", default=None, envvar="TABLESCOUT_LLM_ENDPOINT")
@click.option("--llm-key", default=None, envvar="TABLESCOUT_LLM_KEY")
@click.option("--preload", "preload_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="pool directory to ingest and index at startup (pool id 'default')")
@_exits
def serve(host, port, provider_kind, dim, seed, endpoint, llm_endpoint, llm_key, preload_dir):
    """Serve the HTTP API until interrupted."""
    import uvicorn

    llm = LlmConfig(endpoint=llm_endpoint, api_key=llm_key) if llm_endpoint else None
    app = create_app(
        provider_config=EmbeddingProviderConfig(
            kind=ProviderKind(provider_kind), dim=dim, seed=seed, endpoint=endpoint
        ),
        llm_config=llm,
        preload_dir=preload_dir,
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
