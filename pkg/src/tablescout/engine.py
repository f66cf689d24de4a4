"""Online search pipeline: embed the query, retrieve coarse candidates from
the shared index, score each candidate with the table scorer and the learned
condition scorer, fuse, rank.

One index serves all three query modes. The query vector's content block is
the query table's content vector (union), the key-column embedding (join,
focusing coarse retrieval on the join key) or zeros (NL-only); the metadata
block is the condition embedding or zeros. Zero blocks contribute nothing
to the inner product, so each mode searches the subspace it cares about.

The fused score is ``condition_score + table_weight * table_score`` with
absent components contributing 0; ties break by table id so runs are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .condition_model import FusionModel, condition_score
from .embedding import EmbeddedPool, EmbeddedTable, Provider, embed_table
from .errors import IndexNotReadyError, UnknownTableError
from .hnsw import HnswIndex
from .matching import ScoreKind, TableScore, join_score, union_score
from .tables import QueryMode, QuerySpec, validate_query


@dataclass
class ScoredTable:
    """One ranked candidate with its score breakdown."""

    table_id: str
    score: float
    table_score: float | None = None
    condition_score: float | None = None
    join_column: str | None = None
    # explain payload: (query column, candidate column, weight) per matched edge
    matching: list[tuple[str, str, float]] | None = None


@dataclass
class EngineConfig:
    n_candidates: int = 100
    table_weight: float | None = None  # None: use the model's weighting factor
    default_k: int = 10


@dataclass
class _EmbeddedQuery:
    vector: np.ndarray  # (2d,) index query
    condition_vector: np.ndarray | None
    table: EmbeddedTable | None
    key_vector: np.ndarray | None


def build_query_vector(spec: QuerySpec, provider: Provider) -> np.ndarray:
    """Content block ++ condition block, zero-filled where absent."""
    return _embed_query(spec, provider).vector


def _embed_query(spec: QuerySpec, provider: Provider) -> _EmbeddedQuery:
    d = provider.dim
    content = np.zeros(d, dtype=np.float64)
    table_emb = None
    key_vec = None
    if spec.query_table is not None and spec.mode is not QueryMode.NL_ONLY:
        table_emb = embed_table(provider, spec.query_table)
        if spec.mode is QueryMode.JOIN:
            key_vec = table_emb.column_vectors[table_emb.column_names.index(spec.key_column)]
            content = key_vec
        else:
            content = table_emb.content_vector
    cond_vec = None
    meta_block = np.zeros(d, dtype=np.float64)
    if spec.condition and spec.condition.strip():
        cond_vec = provider.embed(spec.condition)
        meta_block = cond_vec
    return _EmbeddedQuery(
        vector=np.concatenate([content, meta_block]),
        condition_vector=cond_vec,
        table=table_emb,
        key_vector=key_vec,
    )


def _table_score(spec: QuerySpec, query: _EmbeddedQuery, candidate: EmbeddedTable) -> TableScore | None:
    if spec.mode is QueryMode.JOIN:
        return join_score(query.key_vector, candidate.column_vectors)
    if spec.mode is QueryMode.UNION:
        return union_score(query.table.column_vectors, candidate.column_vectors)
    return None


@dataclass
class Engine:
    """Frozen (pool, index, model, provider) bundle answering queries."""

    pool: EmbeddedPool
    index: HnswIndex | None
    model: FusionModel
    provider: Provider
    config: EngineConfig

    def _score_one(
        self, spec: QuerySpec, query: _EmbeddedQuery, candidate: EmbeddedTable, table_weight: float
    ) -> ScoredTable:
        ts = _table_score(spec, query, candidate)
        rho_t = ts.value if ts is not None else None
        rho_c = None
        if query.condition_vector is not None:
            rho_c = condition_score(
                self.model, candidate.column_vectors, candidate.metadata_vector, query.condition_vector
            ).value
        fused = (rho_c if rho_c is not None else 0.0) + table_weight * (rho_t if rho_t is not None else 0.0)
        join_col = None
        matching = None
        if ts is not None and ts.kind is ScoreKind.JOIN and ts.best_column is not None:
            join_col = candidate.column_names[ts.best_column]
        if ts is not None and ts.kind is ScoreKind.UNION and ts.matching is not None:
            matching = [
                (query.table.column_names[i], candidate.column_names[j], w) for i, j, w in ts.matching
            ]
        return ScoredTable(
            table_id=candidate.table_id,
            score=fused,
            table_score=rho_t,
            condition_score=rho_c,
            join_column=join_col,
            matching=matching,
        )

    def execute(self, spec: QuerySpec) -> list[ScoredTable]:
        """Top-k ranked candidates for a validated query."""
        validate_query(spec)
        if self.index is None:
            raise IndexNotReadyError(f"pool {self.pool.pool_id!r} has no index")
        k = spec.k if spec.k else self.config.default_k
        table_weight = (
            self.config.table_weight if self.config.table_weight is not None else self.model.table_weight
        )
        query = _embed_query(spec, self.provider)
        hits = self.index.search(query.vector, max(self.config.n_candidates, k))
        scored = []
        for table_id, _ in hits:
            candidate = self.pool.get(table_id)
            if candidate is None:
                continue
            st = self._score_one(spec, query, candidate, table_weight)
            st.matching = None  # full match details come from explain()
            scored.append(st)
        scored.sort(key=lambda s: (-s.score, s.table_id))
        return scored[:k]

    def explain(self, spec: QuerySpec, table_id: str) -> ScoredTable:
        """Recompute one candidate's scores with full per-column match details."""
        validate_query(spec)
        candidate = self.pool.get(table_id)
        if candidate is None:
            raise UnknownTableError(f"table {table_id!r} not in pool {self.pool.pool_id!r}")
        table_weight = (
            self.config.table_weight if self.config.table_weight is not None else self.model.table_weight
        )
        query = _embed_query(spec, self.provider)
        return self._score_one(spec, query, candidate, table_weight)
