"""Text-in, BeliefDistribution-out wrappers around the two classifiers.

Any object with `labels` and `predict(text)` works as a classifier for
the dialog manager, so tests can drop in deterministic stubs.
"""

from __future__ import annotations

from ..text import encode, preprocess
from .bayes import NBModel, nb_predict, nb_train
from .model_io import BeliefModel
from .network import BeliefDistribution, forward


class LstmClassifier:
    def __init__(self, model: BeliefModel, stopwords: frozenset[str] = frozenset(),
                 entity_lexicon=()):
        self.model = model
        self.stopwords = stopwords
        self.entity_lexicon = entity_lexicon

    @property
    def labels(self) -> tuple[str, ...]:
        return self.model.labels

    def predict(self, text: str) -> BeliefDistribution:
        tokens = preprocess(text, self.stopwords, self.entity_lexicon)
        seq = encode(tokens, self.model.vocab, self.model.seq_len)
        dist, _ = forward(seq, self.model.params, labels=self.model.labels)
        return dist


class NaiveBayesClassifier:
    def __init__(self, model: NBModel, stopwords: frozenset[str] = frozenset(),
                 entity_lexicon=()):
        self.model = model
        self.stopwords = stopwords
        self.entity_lexicon = entity_lexicon

    @classmethod
    def fit(cls, corpus, stopwords: frozenset[str] = frozenset(), entity_lexicon=()):
        tokenized = [(preprocess(text, stopwords, entity_lexicon), label)
                     for text, label in corpus]
        return cls(nb_train(tokenized), stopwords, entity_lexicon)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.model.labels

    def predict(self, text: str) -> BeliefDistribution:
        tokens = preprocess(text, self.stopwords, self.entity_lexicon)
        return nb_predict(self.model, tokens)
