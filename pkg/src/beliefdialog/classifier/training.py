"""Deterministic mini-batch training with Adam, dropout, and a stratified split.

Everything is driven by one seeded generator in a fixed draw order
(split shuffles, parameter init, per-epoch shuffles, dropout masks), so
two runs with the same seed produce bitwise-identical parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError
from ..text import (
    DEFAULT_SEQ_LEN,
    DEFAULT_VOCAB_SIZE,
    TokenList,
    Utterance,
    build_vocabulary,
    encode,
    preprocess,
)
from .adam import AdamState, adam_step
from .network import PROB_FLOOR, ModelParams, backward, forward_batch, init_params


@dataclass
class TrainConfig:
    epochs: int = 20
    batch_size: int = 64
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    dropout_rate: float = 0.5
    rng_seed: int = 0
    train_fraction: float = 0.75
    vocab_size: int = DEFAULT_VOCAB_SIZE
    seq_len: int = DEFAULT_SEQ_LEN
    embed_dim: int = 32
    hidden_units: int = 100

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise InputError("train_fraction must be in (0, 1)")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise InputError("dropout_rate must be in [0, 1)")
        if self.epochs < 1:
            raise InputError("epochs must be >= 1")


@dataclass
class EpochStats:
    epoch: int
    loss: float
    accuracy: float


@dataclass
class TrainReport:
    epochs: list[EpochStats] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    train_size: int = 0
    test_size: int = 0

    @property
    def losses(self) -> list[float]:
        return [e.loss for e in self.epochs]


def _as_text(item) -> str:
    return item.raw if isinstance(item, Utterance) else str(item)


def stratified_split(corpus, train_fraction: float, rng: np.random.Generator):
    """Per-label shuffle then split; keeps every label's proportion intact."""
    by_label: dict[str, list] = {}
    for example in corpus:
        by_label.setdefault(example[1], []).append(example)
    train, test = [], []
    for label in sorted(by_label):
        group = by_label[label]
        order = rng.permutation(len(group))
        n_train = max(1, int(round(len(group) * train_fraction)))
        for rank, position in enumerate(order):
            (train if rank < n_train else test).append(group[position])
    return train, test


def encode_corpus(corpus, vocab, seq_len, stopwords, entity_lexicon, labels):
    xs = np.zeros((len(corpus), seq_len), dtype=np.intp)
    ys = np.zeros(len(corpus), dtype=np.intp)
    for row, (item, label) in enumerate(corpus):
        tokens = item if isinstance(item, TokenList) else preprocess(_as_text(item), stopwords, entity_lexicon)
        xs[row] = encode(tokens, vocab, seq_len).indices
        ys[row] = labels.index(label)
    return xs, ys


def train(corpus, cfg: TrainConfig, labels: tuple[str, ...] = ("curious", "confused", "neutral"),
          stopwords: frozenset[str] = frozenset(), entity_lexicon=()):
    """Train the LSTM classifier; returns ((params, vocab), TrainReport).

    The vocabulary is built from the training split only. Dropout masks
    are drawn fresh per example per epoch.
    """
    if not corpus:
        raise InputError("training corpus is empty")
    seen_labels = {label for _, label in corpus}
    unknown = seen_labels - set(labels)
    if unknown:
        raise InputError(f"corpus labels {sorted(unknown)} not in configured labels {labels}")

    report = TrainReport()
    for label in labels:
        if label not in seen_labels:
            report.warnings.append(f"label {label!r} has no examples in the corpus")

    rng = np.random.default_rng(cfg.rng_seed)
    train_set, test_set = stratified_split(corpus, cfg.train_fraction, rng)
    report.train_size, report.test_size = len(train_set), len(test_set)

    token_lists = [
        item if isinstance(item, TokenList) else preprocess(_as_text(item), stopwords, entity_lexicon)
        for item, _ in train_set
    ]
    vocab = build_vocabulary(token_lists, cfg.vocab_size)
    xs, ys = encode_corpus(train_set, vocab, cfg.seq_len, stopwords, entity_lexicon, labels)

    params = init_params(vocab.size, cfg.embed_dim, cfg.hidden_units, len(labels), rng)
    state = AdamState.zeros(params)

    n = len(train_set)
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        correct = 0
        for start in range(0, n, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            xb, yb = xs[batch], ys[batch]
            mask = None
            if cfg.dropout_rate > 0.0:
                keep = rng.random((len(batch), cfg.hidden_units)) >= cfg.dropout_rate
                mask = keep / (1.0 - cfg.dropout_rate)
            probs, cache = forward_batch(xb, params, mask)
            picked = np.clip(probs[np.arange(len(batch)), yb], PROB_FLOOR, None)
            epoch_loss += float(-np.log(picked).sum())
            correct += int((probs.argmax(axis=1) == yb).sum())
            grads = backward(cache, yb, params)
            params, state = adam_step(params, grads, state, cfg)
        report.epochs.append(EpochStats(epoch + 1, epoch_loss / n, correct / n))
    return (params, vocab), report


def evaluate(params: ModelParams, vocab, testset, labels: tuple[str, ...],
             seq_len: int = DEFAULT_SEQ_LEN, stopwords: frozenset[str] = frozenset(),
             entity_lexicon=()):
    """Accuracy and a CxC confusion matrix (rows true, columns predicted)."""
    if not testset:
        raise InputError("evaluation set is empty")
    xs, ys = encode_corpus(testset, vocab, seq_len, stopwords, entity_lexicon, labels)
    probs, _ = forward_batch(xs, params)
    predicted = probs.argmax(axis=1)
    confusion = np.zeros((len(labels), len(labels)), dtype=int)
    for truth, guess in zip(ys, predicted):
        confusion[truth, guess] += 1
    accuracy = float((predicted == ys).mean())
    return accuracy, confusion


def read_corpus_file(path) -> list[tuple[str, str]]:
    """Read a `label<TAB>utterance` training file; returns (text, label) pairs."""
    corpus = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise InputError(f"line {lineno}: expected `label<TAB>utterance`")
            label, text = line.split("\t", 1)
            corpus.append((text, label))
    return corpus
