"""Learning-free table matching scores.

Join relevance is the best cosine between the query's key column and any
candidate column. Union relevance aligns the two column sets with an exact
maximum-weight bipartite matching (Kuhn-Munkres on a zero-padded square
matrix, O(n^3)) over clamped cosine similarities, normalized by the query
column count so a candidate covering every query column perfectly scores 1
regardless of extra columns.

Negative cosines are clamped to 0 before matching: anti-correlated columns
are never forced to match and scores stay in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimMismatchError, EmptyCandidateError, InvalidWeightError


class ScoreKind(str, Enum):
    JOIN = "join"
    UNION = "union"


@dataclass
class TableScore:
    """A [0,1] single-modal score plus the evidence behind it."""

    value: float
    kind: ScoreKind
    # join: index of the argmax candidate column
    best_column: int | None = None
    # union: matched (query col, candidate col, weight) triples, zero-weight pairs omitted
    matching: list[tuple[int, int, float]] | None = None


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; 0 when either vector has zero norm."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimMismatchError(f"cosine over shapes {u.shape} and {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def similarity_matrix(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Pairwise cosines clamped to [0, 1]; zero-norm rows contribute 0."""
    left = np.atleast_2d(np.asarray(left, dtype=np.float64))
    right = np.atleast_2d(np.asarray(right, dtype=np.float64))
    if left.shape[1] != right.shape[1]:
        raise DimMismatchError(f"column dims differ: {left.shape[1]} vs {right.shape[1]}")
    ln = np.linalg.norm(left, axis=1)
    rn = np.linalg.norm(right, axis=1)
    ln_safe = np.where(ln == 0.0, 1.0, ln)
    rn_safe = np.where(rn == 0.0, 1.0, rn)
    sims = (left / ln_safe[:, None]) @ (right / rn_safe[:, None]).T
    sims[ln == 0.0, :] = 0.0
    sims[:, rn == 0.0] = 0.0
    return np.clip(sims, 0.0, 1.0)


def max_weight_matching(weights: np.ndarray) -> tuple[list[tuple[int, int]], float]:
    """Exact maximum-weight bipartite matching over a non-negative matrix.

    Returns the matched (row, col) pairs (zero-weight pairs omitted: they
    carry no signal and never change the total) and the maximum total.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 2 or weights.size == 0:
        raise EmptyCandidateError("matching needs a non-empty 2-d weight matrix")
    if not np.all(np.isfinite(weights)):
        raise InvalidWeightError("matching weights must be finite")
    if np.any(weights < 0.0):
        raise InvalidWeightError("matching weights must be non-negative")

    n, m = weights.shape
    size = max(n, m)
    # maximize W == minimize (maxW - W) on a zero-padded square matrix
    padded = np.zeros((size, size), dtype=np.float64)
    padded[:n, :m] = weights
    top = float(padded.max())
    cost = top - padded

    # Kuhn-Munkres with row/column potentials, O(size^3)
    INF = float("inf")
    u = np.zeros(size + 1)
    v = np.zeros(size + 1)
    p = np.zeros(size + 1, dtype=np.intp)  # p[j]: 1-indexed row matched to column j
    way = np.zeros(size + 1, dtype=np.intp)
    for i in range(1, size + 1):
        p[0] = i
        j0 = 0
        minv = np.full(size + 1, INF)
        used = np.zeros(size + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            free[0] = False
            cur = cost[i0 - 1, :] - u[i0] - v[1:]
            cols = np.nonzero(free)[0]
            better = cur[cols - 1] < minv[cols]
            upd = cols[better]
            minv[upd] = cur[upd - 1]
            way[upd] = j0
            j1 = cols[np.argmin(minv[cols])]
            delta = minv[j1]
            u[p[used]] += delta
            v[used] -= delta
            minv[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    pairs = []
    total = 0.0
    for j in range(1, size + 1):
        i = int(p[j]) - 1
        jj = j - 1
        if i < n and jj < m and weights[i, jj] > 0.0:
            pairs.append((i, jj))
            total += float(weights[i, jj])
    pairs.sort()
    return pairs, total


def join_score(key_emb: np.ndarray, candidate_columns: np.ndarray) -> TableScore:
    """Best clamped cosine between the key column and any candidate column."""
    candidate_columns = np.atleast_2d(np.asarray(candidate_columns, dtype=np.float64))
    if candidate_columns.shape[0] == 0:
        raise EmptyCandidateError("join_score needs at least one candidate column")
    sims = similarity_matrix(np.asarray(key_emb)[None, :], candidate_columns)[0]
    best = int(np.argmax(sims))
    return TableScore(value=float(sims[best]), kind=ScoreKind.JOIN, best_column=best)


def union_score(query_columns: np.ndarray, candidate_columns: np.ndarray) -> TableScore:
    """Max-weight column alignment normalized by the query column count."""
    query_columns = np.atleast_2d(np.asarray(query_columns, dtype=np.float64))
    candidate_columns = np.atleast_2d(np.asarray(candidate_columns, dtype=np.float64))
    if query_columns.shape[0] == 0 or candidate_columns.shape[0] == 0:
        raise EmptyCandidateError("union_score needs non-empty column sets")
    weights = similarity_matrix(query_columns, candidate_columns)
    pairs, total = max_weight_matching(weights)
    matching = [(i, j, float(weights[i, j])) for i, j in pairs]
    return TableScore(
        value=total / query_columns.shape[0],
        kind=ScoreKind.UNION,
        matching=matching,
    )
