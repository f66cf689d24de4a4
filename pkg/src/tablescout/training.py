"""Pointwise MSE training of the fusion model with hand-derived gradients.

The objective averages, over queries and then over each query's sampled
candidate set, the squared difference between the fused prediction
(head output + table_weight * table score) and the gold label normalized
to [0, 1]. Gradients are derived manually (the max-pool routes gradient to
the argmax column per component, ties to the lowest column index) and are
verified against central finite differences in the test suite.

Optimizer is plain SGD so the gradient contract stays auditable. Candidate
sets contain every labeled positive plus a seed-deterministic sample of
negatives.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .condition_model import (
    FusionHead,
    FusionModel,
    InteractionLayer,
    MetadataLayer,
    interaction_features,
    interaction_features_batch,
)
from .errors import (
    CorruptCheckpointError,
    DivergenceDetectedError,
    EmptyBatchError,
)

CHECKPOINT_MAGIC = b"TSCK"
CHECKPOINT_VERSION = 1


@dataclass
class CandidateExample:
    table_id: str
    column_vectors: np.ndarray  # (n_cols, d)
    metadata_vector: np.ndarray  # (d,)
    table_score: float  # 0.0 when the mode has no table score
    label: float  # gold grade / max grade


@dataclass
class TrainExample:
    query_id: str
    condition_vector: np.ndarray  # (d,)
    candidates: list[CandidateExample]


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    epochs: int = 10
    batch_size: int = 8
    negatives_per_query: int = 32
    seed: int = 0
    optimize_table_weight: bool = False

    def __post_init__(self) -> None:
        if self.learning_rate < 0 or self.epochs < 0 or self.batch_size < 1 or self.negatives_per_query < 0:
            raise ValueError("hyperparameters must be non-negative (batch_size positive)")


@dataclass
class Gradients:
    """Per-tensor gradients in model declaration order, plus the batch loss."""

    tensors: dict[str, np.ndarray]
    table_weight: float
    loss: float


def _forward_candidate(model: FusionModel, cand: CandidateExample, c: np.ndarray) -> dict:
    """Forward pass keeping every intermediate the backward pass needs."""
    feats = interaction_features_batch(cand.column_vectors, c)  # (n, 4d)
    h_mat = np.tanh(feats @ model.interaction.weight.T + model.interaction.bias)  # (n, dh)
    argmax = np.argmax(h_mat, axis=0)  # ties: lowest column index
    h_ct = h_mat[argmax, np.arange(h_mat.shape[1])]

    feats_meta = interaction_features(cand.metadata_vector, c)  # (4d,)
    h_cm = np.tanh(model.metadata.weight @ feats_meta + model.metadata.bias)

    acts = [np.concatenate([h_ct, h_cm])]
    for w, b in model.head.layers[:-1]:
        acts.append(np.tanh(w @ acts[-1] + b))
    w, b = model.head.layers[-1]
    # np.float64 arithmetic overflows to inf instead of raising, so divergence
    # surfaces as the DivergenceDetected check rather than an OverflowError
    out = np.float64((w @ acts[-1] + b)[0])

    pred = out + np.float64(model.table_weight * cand.table_score)
    return {
        "feats": feats,
        "h_mat": h_mat,
        "argmax": argmax,
        "feats_meta": feats_meta,
        "h_cm": h_cm,
        "acts": acts,
        "out": out,
        "pred": pred,
    }


def loss(model: FusionModel, batch: list[TrainExample]) -> float:
    """Mean over queries of the mean squared residual over their candidates."""
    if not batch:
        raise EmptyBatchError("loss over an empty batch")
    total = 0.0
    for ex in batch:
        if not ex.candidates:
            raise EmptyBatchError(f"query {ex.query_id!r} has no candidates")
        sq = np.float64(0.0)
        for cand in ex.candidates:
            trace = _forward_candidate(model, cand, ex.condition_vector)
            sq += (trace["pred"] - np.float64(cand.label)) ** 2
        total += sq / len(ex.candidates)
    return float(total / len(batch))


def zero_gradients(model: FusionModel) -> Gradients:
    return Gradients(
        tensors={name: np.zeros_like(p) for name, p in model.named_parameters()},
        table_weight=0.0,
        loss=0.0,
    )


def backward(model: FusionModel, batch: list[TrainExample]) -> Gradients:
    """Analytic gradients of the batch loss for every trainable tensor."""
    if not batch:
        raise EmptyBatchError("backward over an empty batch")
    grads = zero_gradients(model)
    g = grads.tensors
    total_loss = 0.0
    n_q = len(batch)

    for ex in batch:
        if not ex.candidates:
            raise EmptyBatchError(f"query {ex.query_id!r} has no candidates")
        n_k = len(ex.candidates)
        for cand in ex.candidates:
            trace = _forward_candidate(model, cand, ex.condition_vector)
            residual = trace["pred"] - np.float64(cand.label)
            total_loss += residual**2 / (n_q * n_k)
            g_out = 2.0 * residual / (n_q * n_k)

            # head: linear last layer, tanh hidden layers
            acts = trace["acts"]
            w_last, _ = model.head.layers[-1]
            li = len(model.head.layers) - 1
            g[f"head.{li}.weight"] += g_out * acts[-1][None, :]
            g[f"head.{li}.bias"] += np.array([g_out])
            da = w_last[0] * g_out  # (width,)
            for i in range(len(model.head.layers) - 2, -1, -1):
                w_i, _ = model.head.layers[i]
                a_i = acts[i + 1]  # tanh output of layer i
                dz = (1.0 - a_i**2) * da
                g[f"head.{i}.weight"] += np.outer(dz, acts[i])
                g[f"head.{i}.bias"] += dz
                da = w_i.T @ dz

            dh = model.hidden_dim
            dh_ct = da[:dh]
            dh_cm = da[dh:]

            # metadata branch
            h_cm = trace["h_cm"]
            dpre_m = (1.0 - h_cm**2) * dh_cm
            g["metadata.weight"] += np.outer(dpre_m, trace["feats_meta"])
            g["metadata.bias"] += dpre_m

            # interaction branch: gradient flows only to argmax columns
            h_mat = trace["h_mat"]
            d_h_mat = np.zeros_like(h_mat)
            d_h_mat[trace["argmax"], np.arange(dh)] = dh_ct
            dpre = (1.0 - h_mat**2) * d_h_mat
            g["interaction.weight"] += dpre.T @ trace["feats"]
            g["interaction.bias"] += dpre.sum(axis=0)

            grads.table_weight += g_out * cand.table_score

    grads.loss = float(total_loss)
    return grads


def sgd_step(model: FusionModel, grads: Gradients, learning_rate: float, optimize_table_weight: bool) -> None:
    for name, p in model.named_parameters():
        p -= learning_rate * grads.tensors[name]
    if optimize_table_weight:
        model.table_weight = max(0.0, model.table_weight - learning_rate * grads.table_weight)


def train(
    model: FusionModel,
    examples: list[TrainExample],
    config: TrainConfig,
) -> tuple[FusionModel, list[float]]:
    """Seeded-shuffle SGD; returns the model and the per-epoch mean loss."""
    if not examples:
        raise EmptyBatchError("train over an empty example list")
    rng = np.random.default_rng(config.seed)
    curve: list[float] = []
    order = np.arange(len(examples))
    for epoch in range(config.epochs):
        rng.shuffle(order)
        epoch_losses = []
        for start in range(0, len(order), config.batch_size):
            batch = [examples[i] for i in order[start : start + config.batch_size]]
            grads = backward(model, batch)
            sgd_step(model, grads, config.learning_rate, config.optimize_table_weight)
            epoch_losses.append(grads.loss)
        mean_loss = float(np.mean(epoch_losses))
        if not np.isfinite(mean_loss):
            raise DivergenceDetectedError(f"training loss diverged at epoch {epoch}")
        curve.append(mean_loss)
    return model, curve


# --------------------------------------------------------------------------
# training-set construction
# --------------------------------------------------------------------------


def build_training_set(
    embedded_pool,
    benchmark,
    provider,
    negatives_per_query: int = 32,
    seed: int = 0,
) -> list[TrainExample]:
    """Per query: every labeled positive plus sampled negatives.

    Table scores are computed with the learning-free scorers appropriate to
    the query mode; labels are normalized by the benchmark's maximum grade.
    """
    from .embedding import embed_table
    from .matching import join_score, union_score
    from .tables import QueryMode

    rng = np.random.default_rng(seed)
    pool_ids = sorted(embedded_pool.tables)
    examples: list[TrainExample] = []

    for q in benchmark.queries:
        grades = benchmark.qrels_for(q.query_id)
        positives = sorted(t for t, g in grades.items() if g > 0 and t in embedded_pool.tables)
        # explicitly annotated negatives are hard negatives: take them first,
        # then fill the budget with a seeded sample of unlabeled tables
        hard = sorted(t for t, g in grades.items() if g == 0 and t in embedded_pool.tables)
        hard = hard[:negatives_per_query]
        unlabeled = [t for t in pool_ids if t not in grades]
        n_fill = min(negatives_per_query - len(hard), len(unlabeled))
        sampled = list(rng.choice(unlabeled, size=n_fill, replace=False)) if n_fill > 0 else []
        chosen = positives + hard + [str(t) for t in sampled]

        c_vec = provider.embed(q.condition or "")
        q_emb = embed_table(provider, q.query_table) if q.query_table is not None else None
        key_vec = None
        if q.mode is QueryMode.JOIN and q_emb is not None:
            key_vec = q_emb.column_vectors[q_emb.column_names.index(q.key_column)]

        candidates = []
        for tid in chosen:
            emb = embedded_pool.tables[tid]
            if q.mode is QueryMode.UNION and q_emb is not None:
                rho_t = union_score(q_emb.column_vectors, emb.column_vectors).value
            elif q.mode is QueryMode.JOIN and key_vec is not None:
                rho_t = join_score(key_vec, emb.column_vectors).value
            else:
                rho_t = 0.0
            candidates.append(
                CandidateExample(
                    table_id=tid,
                    column_vectors=emb.column_vectors,
                    metadata_vector=emb.metadata_vector,
                    table_score=rho_t,
                    label=grades.get(tid, 0) / benchmark.max_grade,
                )
            )
        examples.append(TrainExample(query_id=q.query_id or "", condition_vector=c_vec, candidates=candidates))
    return examples


# --------------------------------------------------------------------------
# checkpoints
# --------------------------------------------------------------------------


def save_checkpoint(model: FusionModel, path) -> None:
    """Versioned little-endian binary: header, then float64 tensors in order."""
    parts = [CHECKPOINT_MAGIC, struct.pack("<III", CHECKPOINT_VERSION, model.embed_dim, model.hidden_dim)]
    parts.append(struct.pack("<d", model.table_weight))
    params = model.named_parameters()
    parts.append(struct.pack("<I", len(params)))
    for name, p in params:
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<B", p.ndim))
        parts.append(struct.pack(f"<{p.ndim}I", *p.shape))
        parts.append(np.ascontiguousarray(p, dtype="<f8").tobytes())
    with open(path, "wb") as f:
        f.write(b"".join(parts))


def load_checkpoint(path) -> FusionModel:
    with open(path, "rb") as f:
        blob = f.read()

    class _Reader:
        def __init__(self, buf: bytes):
            self.buf = buf
            self.off = 0

        def take(self, n: int) -> bytes:
            if self.off + n > len(self.buf):
                raise CorruptCheckpointError(f"checkpoint truncated at byte {self.off}")
            out = self.buf[self.off : self.off + n]
            self.off += n
            return out

    r = _Reader(blob)
    if r.take(4) != CHECKPOINT_MAGIC:
        raise CorruptCheckpointError("bad checkpoint magic")
    version, embed_dim, hidden_dim = struct.unpack("<III", r.take(12))
    if version != CHECKPOINT_VERSION:
        raise CorruptCheckpointError(f"unsupported checkpoint version {version}")
    (table_weight,) = struct.unpack("<d", r.take(8))
    (n_tensors,) = struct.unpack("<I", r.take(4))

    tensors: dict[str, np.ndarray] = {}
    order: list[str] = []
    for _ in range(n_tensors):
        (name_len,) = struct.unpack("<H", r.take(2))
        name = r.take(name_len).decode("utf-8")
        (ndim,) = struct.unpack("<B", r.take(1))
        shape = struct.unpack(f"<{ndim}I", r.take(4 * ndim))
        count = int(np.prod(shape)) if shape else 1
        data = np.frombuffer(r.take(8 * count), dtype="<f8").reshape(shape).astype(np.float64)
        tensors[name] = data
        order.append(name)

    try:
        head_idx = sorted({int(n.split(".")[1]) for n in order if n.startswith("head.")})
        head_layers = [(tensors[f"head.{i}.weight"].copy(), tensors[f"head.{i}.bias"].copy()) for i in head_idx]
        model = FusionModel(
            interaction=InteractionLayer(tensors["interaction.weight"].copy(), tensors["interaction.bias"].copy()),
            metadata=MetadataLayer(tensors["metadata.weight"].copy(), tensors["metadata.bias"].copy()),
            head=FusionHead(head_layers),
            table_weight=table_weight,
            embed_dim=embed_dim,
            hidden_dim=hidden_dim,
        )
        model.validate()
    except (KeyError, IndexError, ValueError) as exc:
        raise CorruptCheckpointError(f"checkpoint structure invalid: {exc}") from exc
    except Exception as exc:  # shape validation failures
        raise CorruptCheckpointError(f"checkpoint shapes inconsistent: {exc}") from exc
    return model
