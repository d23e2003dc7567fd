"""The LSTM classifier network, written directly on numpy in float64.

Architecture: shared pad/OOV embedding row 0, a single left-to-right
LSTM layer over all positions, optional inverted dropout on the final
hidden state, then a dense layer with softmax. Gates are packed in a
single 4H axis in i, f, g, o order:

    z = x W + h_prev U + b
    i = sigmoid(z[0:H])    f = sigmoid(z[H:2H])
    g = tanh(z[2H:3H])     o = sigmoid(z[3H:4H])
    c = f * c_prev + i * g
    h = o * tanh(c)

backward() computes exact analytic gradients of the mean cross-entropy
over the batch via backpropagation through time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, NumericError
from ..text import TokenSequence

PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class BeliefDistribution:
    """Probability vector over the belief labels; argmax breaks ties low-index."""

    labels: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.probs):
            raise ConfigError("labels and probs must align")

    @property
    def top_index(self) -> int:
        return int(np.argmax(self.probs))

    @property
    def top_label(self) -> str:
        return self.labels[self.top_index]

    def prob_of(self, label: str) -> float:
        return self.probs[self.labels.index(label)]


@dataclass
class ModelParams:
    """All trainable tensors; shapes follow (V, D, H, C)."""

    embedding: np.ndarray  # (V+1, D)
    lstm_W: np.ndarray     # (D, 4H)
    lstm_U: np.ndarray     # (H, 4H)
    lstm_b: np.ndarray     # (4H,)
    dense_W: np.ndarray    # (H, C)
    dense_b: np.ndarray    # (C,)

    TENSOR_NAMES = ("embedding", "lstm_W", "lstm_U", "lstm_b", "dense_W", "dense_b")

    @property
    def vocab_size(self) -> int:
        return self.embedding.shape[0] - 1

    @property
    def embed_dim(self) -> int:
        return self.embedding.shape[1]

    @property
    def hidden_units(self) -> int:
        return self.lstm_U.shape[0]

    @property
    def n_labels(self) -> int:
        return self.dense_W.shape[1]

    def validate(self):
        d, h, c = self.embed_dim, self.hidden_units, self.n_labels
        expected = {
            "embedding": (self.vocab_size + 1, d),
            "lstm_W": (d, 4 * h),
            "lstm_U": (h, 4 * h),
            "lstm_b": (4 * h,),
            "dense_W": (h, c),
            "dense_b": (c,),
        }
        for name, shape in expected.items():
            tensor = getattr(self, name)
            if tensor.shape != shape:
                raise ConfigError(f"{name} has shape {tensor.shape}, expected {shape}")
            if not np.all(np.isfinite(tensor)):
                raise ConfigError(f"{name} contains non-finite entries")

    def tensors(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in self.TENSOR_NAMES}

    def map(self, fn) -> "ModelParams":
        return ModelParams(**{name: fn(tensor) for name, tensor in self.tensors().items()})

    def copy(self) -> "ModelParams":
        return self.map(np.copy)

    def zeros_like(self) -> "ModelParams":
        return self.map(np.zeros_like)


def init_params(vocab_size: int, embed_dim: int, hidden_units: int, n_labels: int,
                rng: np.random.Generator) -> ModelParams:
    """Seeded init: uniform(-0.05, 0.05) embeddings, fan-in scaled weights, zero biases."""
    def fan_in_uniform(rows, cols):
        limit = 1.0 / np.sqrt(rows)
        return rng.uniform(-limit, limit, size=(rows, cols))

    return ModelParams(
        embedding=rng.uniform(-0.05, 0.05, size=(vocab_size + 1, embed_dim)),
        lstm_W=fan_in_uniform(embed_dim, 4 * hidden_units),
        lstm_U=fan_in_uniform(hidden_units, 4 * hidden_units),
        lstm_b=np.zeros(4 * hidden_units),
        dense_W=fan_in_uniform(hidden_units, n_labels),
        dense_b=np.zeros(n_labels),
    )


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    exp_x = np.exp(x[~pos])
    out[~pos] = exp_x / (1.0 + exp_x)
    return out


def _gates(x, h_prev, c_prev, params):
    hidden = params.hidden_units
    z = x @ params.lstm_W + h_prev @ params.lstm_U + params.lstm_b
    i = _sigmoid(z[..., 0:hidden])
    f = _sigmoid(z[..., hidden:2 * hidden])
    g = np.tanh(z[..., 2 * hidden:3 * hidden])
    o = _sigmoid(z[..., 3 * hidden:4 * hidden])
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return h, c, (i, f, g, o)


def lstm_cell(x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray,
              params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """One LSTM step for a single input vector; returns (h, c)."""
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    c_prev = np.asarray(c_prev, dtype=np.float64)
    if x.shape != (params.embed_dim,) or h_prev.shape != (params.hidden_units,) \
            or c_prev.shape != (params.hidden_units,):
        raise ConfigError(
            f"lstm_cell shapes {x.shape}/{h_prev.shape}/{c_prev.shape} do not match "
            f"(D={params.embed_dim}, H={params.hidden_units})"
        )
    h, c, _ = _gates(x, h_prev, c_prev, params)
    return h, c


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=-1, keepdims=True)


@dataclass
class ForwardCache:
    """Intermediate activations kept for backpropagation through time."""

    indices: np.ndarray          # (B, L) int
    xs: np.ndarray               # (L, B, D)
    gates: list                  # per step (i, f, g, o), each (B, H)
    cs: np.ndarray               # (L+1, B, H) cell states, cs[0] is zeros
    hs: np.ndarray               # (L+1, B, H) hidden states, hs[0] is zeros
    dropout_mask: np.ndarray | None
    h_final: np.ndarray          # (B, H) post-dropout
    probs: np.ndarray            # (B, C)


def forward_batch(indices: np.ndarray, params: ModelParams,
                  dropout_mask: np.ndarray | None = None) -> tuple[np.ndarray, ForwardCache]:
    """Run the network over a (B, L) index matrix; returns (probs (B, C), cache)."""
    indices = np.asarray(indices, dtype=np.intp)
    if indices.ndim != 2:
        raise ConfigError("forward_batch expects a (batch, length) index matrix")
    if indices.size and (indices.min() < 0 or indices.max() > params.vocab_size):
        raise ConfigError("sequence index outside [0, V]")
    batch, length = indices.shape
    hidden = params.hidden_units

    xs = params.embedding[indices].transpose(1, 0, 2)  # (L, B, D)
    hs = np.zeros((length + 1, batch, hidden))
    cs = np.zeros((length + 1, batch, hidden))
    gates = []
    for t in range(length):
        h, c, gate = _gates(xs[t], hs[t], cs[t], params)
        hs[t + 1] = h
        cs[t + 1] = c
        gates.append(gate)

    h_final = hs[length]
    if dropout_mask is not None:
        h_final = h_final * dropout_mask
    logits = h_final @ params.dense_W + params.dense_b
    if not np.all(np.isfinite(logits)):
        raise NumericError("non-finite activations in the dense layer")
    probs = softmax(logits)
    cache = ForwardCache(indices, xs, gates, cs, hs, dropout_mask, h_final, probs)
    return probs, cache


def forward(seq: TokenSequence | np.ndarray, params: ModelParams,
            dropout_mask: np.ndarray | None = None,
            labels: tuple[str, ...] | None = None):
    """Single-sequence forward pass; returns (BeliefDistribution | probs, cache)."""
    indices = np.asarray(seq.indices if isinstance(seq, TokenSequence) else seq)
    mask = None if dropout_mask is None else np.asarray(dropout_mask)[None, :]
    probs, cache = forward_batch(indices[None, :], params, mask)
    if labels is not None:
        return BeliefDistribution(tuple(labels), tuple(probs[0])), cache
    return probs[0], cache


def cross_entropy(dist: BeliefDistribution | np.ndarray, true_label) -> float:
    """-ln p(true), with a 1e-12 probability floor before the log."""
    if isinstance(dist, BeliefDistribution):
        p = dist.probs[dist.labels.index(true_label) if isinstance(true_label, str) else true_label]
    else:
        p = np.asarray(dist)[int(true_label)]
    return float(-np.log(max(float(p), PROB_FLOOR)))


def backward(cache: ForwardCache, true_labels: np.ndarray, params: ModelParams) -> ModelParams:
    """Gradients of the batch-mean cross-entropy w.r.t. every parameter tensor."""
    true_labels = np.atleast_1d(np.asarray(true_labels, dtype=np.intp))
    batch, length = cache.indices.shape
    hidden = params.hidden_units

    grads = params.zeros_like()

    dlogits = cache.probs.copy()
    dlogits[np.arange(batch), true_labels] -= 1.0
    dlogits /= batch

    grads.dense_W += cache.h_final.T @ dlogits
    grads.dense_b += dlogits.sum(axis=0)
    dh = dlogits @ params.dense_W.T
    if cache.dropout_mask is not None:
        dh = dh * cache.dropout_mask

    dc = np.zeros((batch, hidden))
    for t in range(length - 1, -1, -1):
        i, f, g, o = cache.gates[t]
        c = cache.cs[t + 1]
        c_prev = cache.cs[t]
        tanh_c = np.tanh(c)

        do = dh * tanh_c
        dc = dc + dh * o * (1.0 - tanh_c ** 2)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dc = dc * f

        dz = np.concatenate([
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g ** 2),
            do * o * (1.0 - o),
        ], axis=1)

        grads.lstm_W += cache.xs[t].T @ dz
        grads.lstm_U += cache.hs[t].T @ dz
        grads.lstm_b += dz.sum(axis=0)

        dx = dz @ params.lstm_W.T
        np.add.at(grads.embedding, cache.indices[:, t], dx)
        dh = dz @ params.lstm_U.T
    return grads
