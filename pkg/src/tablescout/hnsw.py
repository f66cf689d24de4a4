"""Navigable small-world graph index over concatenated pool vectors.

Metric is inner product (higher is closer): query pool-vectors may carry
zero blocks (no query table, or no condition) and a zero block contributes
exactly 0 to an inner product, so each query mode automatically searches
the relevant subspace of one shared index.

Builds are deterministic: node levels come from a seeded generator in
insertion order, and neighbor selection uses the diversity heuristic
(candidates closer to the query than to anything already selected win).
Layer 0 allows 2*M neighbors, upper layers M.

The index is frozen after build; pools are rebuilt on mutation. Files are
little-endian binary with a version header; see ``save``/``load``.
"""

from __future__ import annotations

import heapq
import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    CorruptIndexError,
    DimMismatchError,
    DuplicateIdError,
    UnsupportedVersionError,
)

INDEX_MAGIC = b"TSHX"
INDEX_VERSION = 1


@dataclass
class HnswParams:
    m: int = 16
    ef_construction: int = 200
    ef_search: int = 64
    seed: int = 0

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ValueError(f"M must be >= 2, got {self.m}")
        if self.ef_construction < 1 or self.ef_search < 1:
            raise ValueError("ef parameters must be positive")


@dataclass
class IndexEntry:
    table_id: str
    vector: np.ndarray


class HnswIndex:
    """Frozen multi-layer graph; build once, search concurrently."""

    def __init__(self, dim: int, params: HnswParams):
        self.dim = dim
        self.params = params
        self._m0 = 2 * params.m
        self._level_scale = 1.0 / math.log(params.m)
        self._vectors = np.zeros((0, dim), dtype=np.float64)
        self._ids: list[str] = []
        self._levels: list[int] = []
        # _neighbors[node][layer] -> list of neighbor node indices
        self._neighbors: list[list[list[int]]] = []
        self._entry_point = -1
        self._max_level = -1

    def __len__(self) -> int:
        return len(self._ids)

    # -- distances: smaller is closer, dist = -inner_product ---------------

    def _dists(self, query: np.ndarray, idxs: list[int]) -> np.ndarray:
        return -(self._vectors[idxs] @ query)

    def _search_layer(
        self, query: np.ndarray, entry_points: list[int], layer: int, ef: int, visited: np.ndarray
    ) -> list[tuple[float, int]]:
        """Best-first search on one layer; returns (dist, node) sorted ascending."""
        visited[entry_points] = True
        dists = self._dists(query, entry_points)
        candidates = [(float(d), i) for d, i in zip(dists, entry_points)]
        heapq.heapify(candidates)
        # best: min-heap on (-dist) so the *farthest* kept node sits on top
        best = [(-d, i) for d, i in candidates]
        heapq.heapify(best)

        while candidates:
            dist, node = heapq.heappop(candidates)
            if len(best) >= ef and dist > -best[0][0]:
                break
            fresh = [nb for nb in self._neighbors[node][layer] if not visited[nb]]
            if not fresh:
                continue
            visited[fresh] = True
            for d, nb in zip(self._dists(query, fresh), fresh):
                d = float(d)
                if len(best) < ef:
                    heapq.heappush(candidates, (d, nb))
                    heapq.heappush(best, (-d, nb))
                elif d < -best[0][0]:
                    heapq.heappush(candidates, (d, nb))
                    heapq.heapreplace(best, (-d, nb))
        out = [(-nd, i) for nd, i in best]
        out.sort()
        return out

    def _select_neighbors(self, candidates: list[tuple[float, int]], m: int, backfill: bool = True) -> list[int]:
        """Diversity-aware selection: keep candidates closer to the query than
        to anything already kept. Insert-time selection backfills pruned
        candidates to reach m; overflow shrinking does not, so neighborhoods
        stay diverse instead of saturating with near-duplicates."""
        if len(candidates) <= m:
            return [i for _, i in sorted(candidates)]
        selected: list[int] = []
        discarded: list[int] = []
        for dist, node in sorted(candidates):
            if len(selected) == m:
                break
            if selected:
                to_selected = float(np.min(-(self._vectors[selected] @ self._vectors[node])))
                if dist >= to_selected:
                    discarded.append(node)
                    continue
            selected.append(node)
        if backfill:
            for node in discarded:
                if len(selected) >= m:
                    break
                selected.append(node)
        return selected

    def _shrink(self, node: int, layer: int) -> None:
        bound = self._m0 if layer == 0 else self.params.m
        neighbors = self._neighbors[node][layer]
        if len(neighbors) <= bound:
            return
        dists = -(self._vectors[neighbors] @ self._vectors[node])
        cand = [(float(d), nb) for d, nb in zip(dists, neighbors)]
        self._neighbors[node][layer] = self._select_neighbors(cand, bound, backfill=False)

    def _insert(self, idx: int, level: int) -> None:
        self._neighbors.append([[] for _ in range(level + 1)])
        self._levels.append(level)
        if self._entry_point < 0:
            self._entry_point = idx
            self._max_level = level
            return

        query = self._vectors[idx]
        visited = np.zeros(len(self._ids), dtype=bool)
        eps = [self._entry_point]
        for layer in range(self._max_level, level, -1):
            visited[:] = False
            found = self._search_layer(query, eps, layer, 1, visited)
            eps = [i for _, i in found]

        for layer in range(min(level, self._max_level), -1, -1):
            visited[:] = False
            found = self._search_layer(query, eps, layer, self.params.ef_construction, visited)
            bound = self._m0 if layer == 0 else self.params.m
            chosen = self._select_neighbors(found, bound)
            self._neighbors[idx][layer] = list(chosen)
            for nb in chosen:
                self._neighbors[nb][layer].append(idx)
                self._shrink(nb, layer)
            eps = [i for _, i in found]

        if level > self._max_level:
            self._entry_point = idx
            self._max_level = level

    def search(self, query: np.ndarray, n: int) -> list[tuple[str, float]]:
        """Top-n (table_id, inner-product score), ties broken by id ascending."""
        if n < 1:
            raise ValueError("n must be >= 1")
        if not self._ids:
            return []
        query = np.asarray(query, dtype=np.float64)
        if query.shape != (self.dim,):
            raise DimMismatchError(f"query shape {query.shape} != ({self.dim},)")
        ef = max(self.params.ef_search, n)
        visited = np.zeros(len(self._ids), dtype=bool)
        eps = [self._entry_point]
        for layer in range(self._max_level, 0, -1):
            visited[:] = False
            found = self._search_layer(query, eps, layer, 1, visited)
            eps = [i for _, i in found]
        visited[:] = False
        found = self._search_layer(query, eps, 0, ef, visited)
        scored = [(self._ids[i], -d) for d, i in found]
        scored.sort(key=lambda t: (-t[1], t[0]))
        return scored[:n]


def build(entries: list[IndexEntry], params: HnswParams | None = None) -> HnswIndex:
    """Construct a deterministic index; insertion order is the given order."""
    params = params or HnswParams()
    if entries:
        dim = int(np.asarray(entries[0].vector).shape[0])
    else:
        dim = 0
    index = HnswIndex(dim=dim, params=params)
    if not entries:
        return index

    seen: set[str] = set()
    vectors = np.zeros((len(entries), dim), dtype=np.float64)
    for i, e in enumerate(entries):
        v = np.asarray(e.vector, dtype=np.float64)
        if v.shape != (dim,):
            raise DimMismatchError(f"entry {e.table_id!r} has shape {v.shape}, expected ({dim},)")
        if e.table_id in seen:
            raise DuplicateIdError(f"duplicate index id {e.table_id!r}")
        seen.add(e.table_id)
        vectors[i] = v

    index._vectors = vectors
    rng = np.random.default_rng(params.seed)
    uniforms = rng.random(len(entries))
    for i, e in enumerate(entries):
        index._ids.append(e.table_id)
        level = int(-math.log(max(uniforms[i], 1e-300)) * index._level_scale)
        index._insert(i, level)
    return index


def brute_force_search(entries: list[IndexEntry], query: np.ndarray, n: int) -> list[tuple[str, float]]:
    """Exact top-n by inner product with the same id-ascending tie-break."""
    if not entries:
        return []
    query = np.asarray(query, dtype=np.float64)
    vectors = np.stack([np.asarray(e.vector, dtype=np.float64) for e in entries])
    if vectors.shape[1] != query.shape[0]:
        raise DimMismatchError(f"query dim {query.shape[0]} != entries dim {vectors.shape[1]}")
    scores = vectors @ query
    ids = np.array([e.table_id for e in entries])
    order = np.lexsort((ids, -scores))[:n]
    return [(str(ids[i]), float(scores[i])) for i in order]


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------


def save(index: HnswIndex, path) -> None:
    """Little-endian binary: header, node table, adjacency lists, id dictionary."""
    parts = [INDEX_MAGIC]
    parts.append(
        struct.pack(
            "<IIIIIQqqi",
            INDEX_VERSION,
            index.dim,
            index.params.m,
            index.params.ef_construction,
            index.params.ef_search,
            len(index),
            index.params.seed,
            index._entry_point,
            index._max_level,
        )
    )
    # node table: level then vector per node
    for i in range(len(index)):
        parts.append(struct.pack("<I", index._levels[i]))
        parts.append(np.ascontiguousarray(index._vectors[i], dtype="<f8").tobytes())
    # layered adjacency lists
    for i in range(len(index)):
        for layer in range(index._levels[i] + 1):
            nbrs = index._neighbors[i][layer]
            parts.append(struct.pack(f"<I{len(nbrs)}I", len(nbrs), *nbrs))
    # id dictionary
    for table_id in index._ids:
        encoded = table_id.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
    with open(path, "wb") as f:
        f.write(b"".join(parts))


def load(path) -> HnswIndex:
    with open(path, "rb") as f:
        blob = f.read()
    off = 0

    def take(n: int) -> bytes:
        nonlocal off
        if off + n > len(blob):
            raise CorruptIndexError(f"index file truncated at byte {off} (needed {n} more)")
        chunk = blob[off : off + n]
        off += n
        return chunk

    if take(4) != INDEX_MAGIC:
        raise CorruptIndexError("bad index magic at byte 0")
    version, dim, m, ef_construction, ef_search, count, seed, entry_point, max_level = struct.unpack(
        "<IIIIIQqqi", take(48)
    )
    if version > INDEX_VERSION:
        raise UnsupportedVersionError(f"index version {version} is newer than supported {INDEX_VERSION}")
    if version != INDEX_VERSION:
        raise CorruptIndexError(f"unreadable index version {version}")

    params = HnswParams(m=m, ef_construction=ef_construction, ef_search=ef_search, seed=seed)
    index = HnswIndex(dim=dim, params=params)
    vectors = np.zeros((count, dim), dtype=np.float64)
    levels: list[int] = []
    for i in range(count):
        (level,) = struct.unpack("<I", take(4))
        levels.append(level)
        vectors[i] = np.frombuffer(take(8 * dim), dtype="<f8")
    neighbors: list[list[list[int]]] = []
    for i in range(count):
        per_layer = []
        for _ in range(levels[i] + 1):
            (n_nbrs,) = struct.unpack("<I", take(4))
            per_layer.append(list(struct.unpack(f"<{n_nbrs}I", take(4 * n_nbrs))))
        neighbors.append(per_layer)
    ids: list[str] = []
    for _ in range(count):
        (id_len,) = struct.unpack("<H", take(2))
        ids.append(take(id_len).decode("utf-8"))
    if off != len(blob):
        raise CorruptIndexError(f"trailing bytes at offset {off}")
    if len(set(ids)) != len(ids):
        raise CorruptIndexError("id dictionary contains duplicates")

    index._vectors = vectors
    index._levels = levels
    index._neighbors = neighbors
    index._ids = ids
    index._entry_point = int(entry_point)
    index._max_level = int(max_level)
    return index
