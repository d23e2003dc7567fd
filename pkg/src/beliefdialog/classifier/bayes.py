"""Multinomial naive Bayes over bag-of-words counts, add-1 smoothing.

The baseline that the LSTM is compared against. Likelihoods are
(count(w, c) + 1) / (total_c + |V|) with V the training vocabulary;
tokens outside V still contribute the smoothed floor for each class.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from ..errors import InputError
from ..text import TokenList, preprocess
from .network import BeliefDistribution


@dataclass
class NBModel:
    labels: tuple[str, ...]
    class_counts: dict[str, int]
    word_counts: dict[str, Counter] = field(repr=False)
    class_totals: dict[str, int] = field(repr=False)
    vocabulary: frozenset = field(repr=False)


def nb_train(corpus, stopwords: frozenset[str] = frozenset()) -> NBModel:
    """Train from (text-or-TokenList, label) pairs."""
    if not corpus:
        raise InputError("naive Bayes training corpus is empty")
    class_counts: dict[str, int] = {}
    word_counts: dict[str, Counter] = {}
    vocabulary = set()
    for item, label in corpus:
        tokens = item if isinstance(item, TokenList) else preprocess(str(item), stopwords)
        class_counts[label] = class_counts.get(label, 0) + 1
        counts = word_counts.setdefault(label, Counter())
        counts.update(tokens)
        vocabulary.update(tokens)
    labels = tuple(sorted(class_counts))
    class_totals = {label: sum(word_counts[label].values()) for label in labels}
    return NBModel(labels, class_counts, word_counts, class_totals, frozenset(vocabulary))


def nb_predict(model: NBModel, tokens: TokenList | list[str]) -> BeliefDistribution:
    """Normalized posterior over the labels for a bag of tokens."""
    token_seq = list(tokens)
    total_docs = sum(model.class_counts.values())
    vocab_size = len(model.vocabulary)
    log_posts = []
    for label in model.labels:
        log_p = math.log(model.class_counts[label] / total_docs)
        denom = max(model.class_totals[label] + vocab_size, 1)
        counts = model.word_counts[label]
        for token in token_seq:
            log_p += math.log((counts.get(token, 0) + 1) / denom)
        log_posts.append(log_p)
    peak = max(log_posts)
    weights = [math.exp(lp - peak) for lp in log_posts]
    total = sum(weights)
    return BeliefDistribution(model.labels, tuple(w / total for w in weights))
