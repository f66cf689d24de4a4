"""Learned cross-modal condition scoring.

The condition-table branch builds interaction features between the NL
condition vector and each candidate column vector (the two vectors, their
difference and their Hadamard product), pushes them through a Tanh layer
and max-pools over the candidate's columns, keeping the content most
relevant to the condition. The condition-metadata branch applies the same
feature construction to the metadata embedding with its own parameters.
Both hidden vectors are concatenated and a small MLP head (Tanh hidden
layers, linear scalar output) produces the condition score.

The final ranking score is ``condition score + table_weight * table score``;
``table_weight`` lives on the model so checkpoints carry it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatchError, EmptyVectorListError


@dataclass
class InteractionLayer:
    """Tanh layer over condition-column interaction features."""

    weight: np.ndarray  # (hidden_dim, 4 * embed_dim)
    bias: np.ndarray  # (hidden_dim,)


@dataclass
class MetadataLayer:
    """Tanh layer over condition-metadata interaction features."""

    weight: np.ndarray  # (hidden_dim, 4 * embed_dim)
    bias: np.ndarray  # (hidden_dim,)


@dataclass
class FusionHead:
    """MLP: Tanh hidden layers, final layer linear with scalar output."""

    layers: list[tuple[np.ndarray, np.ndarray]]

    def validate(self, input_dim: int) -> None:
        if not self.layers:
            raise DimMismatchError("fusion head needs at least one layer")
        expect = input_dim
        for i, (w, b) in enumerate(self.layers):
            if w.ndim != 2 or w.shape[1] != expect or b.shape != (w.shape[0],):
                raise DimMismatchError(
                    f"head layer {i}: weight {w.shape} / bias {b.shape} do not chain from dim {expect}"
                )
            expect = w.shape[0]
        if expect != 1:
            raise DimMismatchError(f"head output dim must be 1, got {expect}")


@dataclass
class FusionModel:
    """All learned parameters plus the table-score weighting factor."""

    interaction: InteractionLayer
    metadata: MetadataLayer
    head: FusionHead
    table_weight: float = 1.0
    embed_dim: int = 256
    hidden_dim: int = 128

    def validate(self) -> None:
        d4 = 4 * self.embed_dim
        dh = self.hidden_dim
        if self.interaction.weight.shape != (dh, d4) or self.interaction.bias.shape != (dh,):
            raise DimMismatchError("interaction layer shapes inconsistent with (embed_dim, hidden_dim)")
        if self.metadata.weight.shape != (dh, d4) or self.metadata.bias.shape != (dh,):
            raise DimMismatchError("metadata layer shapes inconsistent with (embed_dim, hidden_dim)")
        if self.table_weight < 0.0:
            raise ValueError("table_weight must be non-negative")
        self.head.validate(2 * dh)

    def named_parameters(self) -> list[tuple[str, np.ndarray]]:
        """Trainable tensors in declaration order (checkpoint order)."""
        params = [
            ("interaction.weight", self.interaction.weight),
            ("interaction.bias", self.interaction.bias),
            ("metadata.weight", self.metadata.weight),
            ("metadata.bias", self.metadata.bias),
        ]
        for i, (w, b) in enumerate(self.head.layers):
            params.append((f"head.{i}.weight", w))
            params.append((f"head.{i}.bias", b))
        return params

    @classmethod
    def initialize(
        cls,
        embed_dim: int,
        hidden_dim: int = 128,
        head_hidden: tuple[int, ...] = (64,),
        table_weight: float = 1.0,
        seed: int = 0,
    ) -> "FusionModel":
        """Seeded uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)]."""
        rng = np.random.default_rng(seed)

        def layer(fan_out: int, fan_in: int) -> tuple[np.ndarray, np.ndarray]:
            bound = 1.0 / np.sqrt(fan_in)
            w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
            b = rng.uniform(-bound, bound, size=fan_out)
            return w, b

        d4 = 4 * embed_dim
        iw, ib = layer(hidden_dim, d4)
        mw, mb = layer(hidden_dim, d4)
        widths = [2 * hidden_dim, *head_hidden, 1]
        head_layers = [layer(widths[i + 1], widths[i]) for i in range(len(widths) - 1)]
        model = cls(
            interaction=InteractionLayer(iw, ib),
            metadata=MetadataLayer(mw, mb),
            head=FusionHead(head_layers),
            table_weight=table_weight,
            embed_dim=embed_dim,
            hidden_dim=hidden_dim,
        )
        model.validate()
        return model


@dataclass
class ConditionScore:
    """Learned condition score plus the two hidden vectors that produced it."""

    value: float
    table_interaction: np.ndarray  # (hidden_dim,)
    metadata_interaction: np.ndarray  # (hidden_dim,)


# --------------------------------------------------------------------------
# forward operations
# --------------------------------------------------------------------------


def interaction_features(t: np.ndarray, c: np.ndarray) -> np.ndarray:
    """concat(t, c, t - c, t * c) for equal-dim vectors."""
    t = np.asarray(t, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if t.shape != c.shape or t.ndim != 1:
        raise DimMismatchError(f"interaction features over shapes {t.shape} and {c.shape}")
    return np.concatenate([t, c, t - c, t * c])


def interaction_features_batch(rows: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Row-wise interaction features: (n, d) x (d,) -> (n, 4d)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    c = np.asarray(c, dtype=np.float64)
    if rows.shape[1] != c.shape[0]:
        raise DimMismatchError(f"columns dim {rows.shape[1]} != condition dim {c.shape[0]}")
    tiled = np.broadcast_to(c, rows.shape)
    return np.concatenate([rows, tiled, rows - c, rows * c], axis=1)


def hidden(layer: InteractionLayer | MetadataLayer, x: np.ndarray) -> np.ndarray:
    """tanh(W x + b); outputs lie strictly inside (-1, 1)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (layer.weight.shape[1],):
        raise DimMismatchError(f"hidden input {x.shape} != expected ({layer.weight.shape[1]},)")
    return np.tanh(layer.weight @ x + layer.bias)


def max_pool(vectors: list[np.ndarray] | np.ndarray) -> np.ndarray:
    """Componentwise maximum over a non-empty stack of equal-dim vectors."""
    arr = np.asarray(vectors, dtype=np.float64)
    if arr.size == 0:
        raise EmptyVectorListError("max_pool over an empty list")
    arr = np.atleast_2d(arr)
    return arr.max(axis=0)


def condition_table_vector(model: FusionModel, column_vectors: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Max-pool of the hidden interaction vectors over a candidate's columns."""
    column_vectors = np.atleast_2d(np.asarray(column_vectors, dtype=np.float64))
    if column_vectors.shape[0] == 0:
        raise EmptyVectorListError("candidate has no embedded columns")
    feats = interaction_features_batch(column_vectors, c)  # (n, 4d)
    h = np.tanh(feats @ model.interaction.weight.T + model.interaction.bias)  # (n, dh)
    return h.max(axis=0)


def condition_metadata_vector(model: FusionModel, meta_emb: np.ndarray, c: np.ndarray) -> np.ndarray:
    return hidden(model.metadata, interaction_features(np.asarray(meta_emb, dtype=np.float64), c))


def head_forward(head: FusionHead, x: np.ndarray) -> float:
    """Tanh hidden layers, linear last layer, scalar output."""
    if x.shape != (head.layers[0][0].shape[1],):
        raise DimMismatchError(f"head input {x.shape} != expected ({head.layers[0][0].shape[1]},)")
    for w, b in head.layers[:-1]:
        x = np.tanh(w @ x + b)
    w, b = head.layers[-1]
    return float((w @ x + b)[0])


def condition_score(
    model: FusionModel,
    column_vectors: np.ndarray,
    meta_emb: np.ndarray,
    c: np.ndarray,
) -> ConditionScore:
    """Full condition-scoring forward pass for one candidate table."""
    h_ct = condition_table_vector(model, column_vectors, c)
    h_cm = condition_metadata_vector(model, meta_emb, c)
    value = head_forward(model.head, np.concatenate([h_ct, h_cm]))
    return ConditionScore(value=value, table_interaction=h_ct, metadata_interaction=h_cm)
