"""Text/column/table embedding behind a pluggable provider contract.

Two providers ship with the package:

- ``hashing``: deterministic signed feature hashing. Tokens are lowercased,
  split on non-alphanumerics, mapped to a dimension by one 64-bit hash and
  to a sign by a second, accumulated and L2-normalized. No model weights,
  bit-identical across processes for a fixed (dim, seed).
- ``remote``: any HTTP encoder service speaking ``POST /embed`` with body
  ``{"texts": [...]}`` and response ``{"dim": n, "vectors": [[...], ...]}``.
  This is where a real PLM encoder plugs in.

All embeddings are float64 unit vectors; the empty token stream embeds to
the zero vector so tables without metadata stay indexable.

A pool is embedded once, offline: per-table column vectors are kept for the
scorers and the content/metadata blocks are concatenated into the vector
the ANN index stores.
"""

from __future__ import annotations

import hashlib
import re
import threading
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimMismatchError, ProviderUnavailableError
from .tables import ColumnData, TableMetadata, TablePool, TableRecord

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class ProviderKind(str, Enum):
    HASHING = "hashing"
    REMOTE = "remote"


@dataclass
class EmbeddingProviderConfig:
    kind: ProviderKind = ProviderKind.HASHING
    dim: int = 256
    max_cells_per_column: int = 64
    seed: int = 0
    endpoint: str | None = None
    max_in_flight: int = 8

    def __post_init__(self) -> None:
        if self.dim < 8:
            raise ValueError(f"dim must be >= 8, got {self.dim}")
        if self.max_cells_per_column < 1:
            raise ValueError("max_cells_per_column must be positive")
        if self.kind is ProviderKind.REMOTE and not self.endpoint:
            raise ValueError("remote provider needs an endpoint URL")


@dataclass
class PoolVector:
    """Content block ++ metadata block; the unit the ANN index stores."""

    content: np.ndarray
    metadata: np.ndarray
    concatenated: np.ndarray


class HashingProvider:
    """Signed feature hashing: dependency-free, deterministic test encoder."""

    def __init__(self, config: EmbeddingProviderConfig):
        self.config = config
        self.dim = config.dim
        self._key = config.seed.to_bytes(8, "little", signed=True)
        # token -> (dimension index, sign); tokens repeat heavily across a pool
        self._cache: dict[str, tuple[int, float]] = {}

    def _slot(self, token: str) -> tuple[int, float]:
        hit = self._cache.get(token)
        if hit is not None:
            return hit
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=16, key=self._key).digest()
        idx = int.from_bytes(digest[:8], "little") % self.dim
        sign = 1.0 if int.from_bytes(digest[8:], "little") % 2 == 0 else -1.0
        self._cache[token] = (idx, sign)
        return idx, sign

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        tokens = _TOKEN_RE.findall(text.lower())
        if not tokens:
            return vec
        slot = self._slot
        idxs = np.empty(len(tokens), dtype=np.intp)
        signs = np.empty(len(tokens), dtype=np.float64)
        for i, tok in enumerate(tokens):
            idxs[i], signs[i] = slot(tok)
        np.add.at(vec, idxs, signs)
        norm = np.linalg.norm(vec)
        if norm > 0.0:
            vec /= norm
        return vec

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]


class RemoteProvider:
    """Client for an external encoder service; bounds in-flight requests."""

    def __init__(self, config: EmbeddingProviderConfig, transport=None):
        import httpx

        self.config = config
        self.dim = config.dim
        self._sem = threading.Semaphore(config.max_in_flight)
        self._client = httpx.Client(transport=transport, timeout=30.0)

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        import httpx

        with self._sem:
            try:
                resp = self._client.post(self.config.endpoint, json={"texts": texts})
            except httpx.HTTPError as exc:
                raise ProviderUnavailableError(f"embed endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailableError(f"embed endpoint returned {resp.status_code}")
        payload = resp.json()
        if payload.get("dim") != self.dim:
            raise DimMismatchError(f"provider dim {payload.get('dim')} != configured {self.dim}")
        out = []
        for row in payload["vectors"]:
            vec = np.asarray(row, dtype=np.float64)
            if vec.shape != (self.dim,):
                raise DimMismatchError(f"provider vector has shape {vec.shape}, expected ({self.dim},)")
            norm = np.linalg.norm(vec)
            if norm > 0.0:
                vec = vec / norm
            out.append(vec)
        return out

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]


Provider = HashingProvider | RemoteProvider


def make_provider(config: EmbeddingProviderConfig, transport=None) -> Provider:
    if config.kind is ProviderKind.HASHING:
        return HashingProvider(config)
    return RemoteProvider(config, transport=transport)


# --------------------------------------------------------------------------
# serialization and table-level vectors
# --------------------------------------------------------------------------


def serialize_column(col: ColumnData, meta: TableMetadata, max_cells: int = 64) -> str:
    """Caption | column name | first ``max_cells`` distinct cell values."""
    distinct: list[str] = []
    seen = set()
    for v in col.values:
        if v not in seen:
            seen.add(v)
            distinct.append(v)
            if len(distinct) >= max_cells:
                break
    return " | ".join([meta.caption, col.name, ", ".join(distinct)])


def embed_text(provider: Provider, text: str) -> np.ndarray:
    return provider.embed(text)


def embed_column(provider: Provider, col: ColumnData, meta: TableMetadata) -> np.ndarray:
    return provider.embed(serialize_column(col, meta, provider.config.max_cells_per_column))


def table_content_vector(provider: Provider, table: TableRecord) -> np.ndarray:
    """L2-normalized mean of the table's column embeddings.

    The per-column embeddings are variable in number, so the fixed-dimension
    content vector for indexing is their normalized mean; the columns
    themselves are kept separately for the scorers.
    """
    cols = np.stack([embed_column(provider, c, table.metadata) for c in table.columns])
    return _normalized_mean(cols)


def _normalized_mean(rows: np.ndarray) -> np.ndarray:
    mean = rows.mean(axis=0)
    norm = np.linalg.norm(mean)
    if norm > 0.0:
        mean = mean / norm
    return mean


def metadata_vector(provider: Provider, table: TableRecord) -> np.ndarray:
    return provider.embed(table.metadata.text())


def pool_vector(provider: Provider, table: TableRecord) -> PoolVector:
    content = table_content_vector(provider, table)
    meta = metadata_vector(provider, table)
    return PoolVector(content=content, metadata=meta, concatenated=np.concatenate([content, meta]))


# --------------------------------------------------------------------------
# offline pool embedding
# --------------------------------------------------------------------------


@dataclass
class EmbeddedTable:
    """Everything the online scorers need about one pool table."""

    table_id: str
    column_names: list[str]
    column_vectors: np.ndarray  # (n_cols, d)
    metadata_vector: np.ndarray  # (d,)
    content_vector: np.ndarray  # (d,)

    @property
    def concatenated(self) -> np.ndarray:
        return np.concatenate([self.content_vector, self.metadata_vector])


@dataclass
class EmbeddedPool:
    """Offline-computed embeddings for a whole pool."""

    pool_id: str
    dim: int
    tables: dict[str, EmbeddedTable] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.tables)

    def get(self, table_id: str) -> EmbeddedTable | None:
        return self.tables.get(table_id)


def embed_table(provider: Provider, table: TableRecord) -> EmbeddedTable:
    cols = np.stack([embed_column(provider, c, table.metadata) for c in table.columns])
    return EmbeddedTable(
        table_id=table.id,
        column_names=table.column_names(),
        column_vectors=cols,
        metadata_vector=metadata_vector(provider, table),
        content_vector=_normalized_mean(cols),
    )


def embed_pool(provider: Provider, pool: TablePool) -> EmbeddedPool:
    embedded = EmbeddedPool(pool_id=pool.pool_id, dim=provider.dim)
    for table in pool:
        embedded.tables[table.id] = embed_table(provider, table)
    return embedded


def save_embedded_pool(embedded: EmbeddedPool, path) -> None:
    """Persist per-table embeddings as a compressed npz plus a names record."""
    import json

    arrays: dict[str, np.ndarray] = {}
    names: dict[str, list[str]] = {}
    for tid, t in embedded.tables.items():
        arrays[f"cols::{tid}"] = t.column_vectors
        arrays[f"meta::{tid}"] = t.metadata_vector
        names[tid] = t.column_names
    arrays["__names__"] = np.frombuffer(
        json.dumps({"pool_id": embedded.pool_id, "dim": embedded.dim, "columns": names}).encode("utf-8"),
        dtype=np.uint8,
    )
    np.savez_compressed(path, **arrays)


def load_embedded_pool(path) -> EmbeddedPool:
    import json

    with np.load(path) as data:
        header = json.loads(bytes(data["__names__"]).decode("utf-8"))
        embedded = EmbeddedPool(pool_id=header["pool_id"], dim=int(header["dim"]))
        for tid, col_names in header["columns"].items():
            cols = np.asarray(data[f"cols::{tid}"], dtype=np.float64)
            meta = np.asarray(data[f"meta::{tid}"], dtype=np.float64)
            embedded.tables[tid] = EmbeddedTable(
                table_id=tid,
                column_names=list(col_names),
                column_vectors=cols,
                metadata_vector=meta,
                content_vector=_normalized_mean(cols),
            )
    return embedded
