"""Deterministic text preprocessing, vocabulary construction, and encoding.

Everything here is a pure function: lowercase + strip punctuation +
whitespace tokenization, stopword removal, entity tagging from a small
pattern lexicon, frequency-ranked vocabularies, and fixed-length index
encoding with index 0 shared by padding and out-of-vocabulary tokens.
"""

from __future__ import annotations

import re
import string
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .errors import ConfigError, InputError

DEFAULT_VOCAB_SIZE = 300
DEFAULT_SEQ_LEN = 50

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)
_SENTENCE_SPLIT = re.compile(r"[.?!]+")


class Speaker(str, Enum):
    USER = "user"
    ADVISOR = "advisor"


@dataclass(frozen=True)
class Utterance:
    raw: str
    speaker: Speaker = Speaker.USER
    turn_index: int = 0

    def __post_init__(self):
        if self.raw is None:
            raise InputError("utterance text must not be None")
        if self.turn_index < 0:
            raise InputError("turn_index must be non-negative")


@dataclass(frozen=True)
class TokenList:
    """Ordered lowercase tokens with an optional entity tag per token."""

    tokens: tuple[str, ...]
    entity_tags: tuple[str | None, ...] = ()

    def __post_init__(self):
        if not self.entity_tags:
            object.__setattr__(self, "entity_tags", (None,) * len(self.tokens))
        elif len(self.entity_tags) != len(self.tokens):
            raise InputError("entity_tags must align with tokens")

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self):
        return len(self.tokens)


class EntityPattern:
    """One anchored pattern from the restricted regex subset.

    Allowed syntax: literal characters, character classes like [a-z0-9],
    and the + quantifier. Anything else is rejected at load time.
    """

    _ALLOWED = re.compile(r"^(?:[a-z0-9_]|\[[a-z0-9\-]+\]|\+)+$")

    def __init__(self, pattern: str, tag: str = "ENTITY"):
        if not self._ALLOWED.match(pattern):
            raise ConfigError(f"entity pattern {pattern!r} is outside the supported subset")
        self.pattern = pattern
        self.tag = tag
        self._regex = re.compile(pattern)

    def matches(self, token: str) -> bool:
        return self._regex.fullmatch(token) is not None


# Course codes like stats250 are the one entity the advisor domain needs.
DEFAULT_ENTITY_PATTERNS = (EntityPattern("[a-z]+[0-9]+", "COURSE_CODE"),)


def load_stopwords(path) -> frozenset[str]:
    """Read a stopword file: UTF-8, one lowercase word per line, '#' comments."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.split("#", 1)[0].strip()
            if word:
                words.add(word.lower())
    return frozenset(words)


def load_entity_lexicon(path) -> tuple[EntityPattern, ...]:
    """Read an entity lexicon file: one `pattern TAG` per line, '#' comments."""
    patterns = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            tag = parts[1] if len(parts) > 1 else "ENTITY"
            patterns.append(EntityPattern(parts[0], tag))
    return tuple(patterns)


def split_sentences(raw: str) -> list[str]:
    """Split on sentence punctuation ([.?!]); drops empty fragments."""
    return [part.strip() for part in _SENTENCE_SPLIT.split(raw) if part.strip()]


def tokenize(raw: str) -> list[str]:
    """Lowercase, strip punctuation characters, split on whitespace."""
    out = []
    for chunk in raw.lower().split():
        token = chunk.translate(_PUNCT_TABLE)
        if token:
            out.append(token)
    return out


def preprocess(
    raw: str,
    stopwords: frozenset[str] = frozenset(),
    entity_lexicon: tuple[EntityPattern, ...] = DEFAULT_ENTITY_PATTERNS,
) -> TokenList:
    """Clean an utterance into a TokenList.

    Tokens matching an entity pattern are kept (and tagged) even though
    stopword filtering applies to everything else.
    """
    tokens: list[str] = []
    tags: list[str | None] = []
    for token in tokenize(raw):
        tag = next((p.tag for p in entity_lexicon if p.matches(token)), None)
        if tag is None and token in stopwords:
            continue
        tokens.append(token)
        tags.append(tag)
    return TokenList(tuple(tokens), tuple(tags))


@dataclass(frozen=True)
class Vocabulary:
    """Token -> index map; indices form a bijection onto 1..V, 0 is pad/OOV."""

    word_to_index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        indices = sorted(self.word_to_index.values())
        if indices != list(range(1, len(indices) + 1)):
            raise ConfigError("vocabulary indices must be a bijection onto 1..V")

    @property
    def size(self) -> int:
        return len(self.word_to_index)

    def index_of(self, token: str) -> int:
        return self.word_to_index.get(token, 0)

    def __contains__(self, token: str) -> bool:
        return token in self.word_to_index


def build_vocabulary(corpus: list[TokenList], size: int = DEFAULT_VOCAB_SIZE) -> Vocabulary:
    """Rank tokens by descending frequency (ties lexicographic) and keep the top `size`."""
    if size < 1:
        raise InputError("vocabulary size must be >= 1")
    counts = Counter()
    for token_list in corpus:
        counts.update(token_list.tokens)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return Vocabulary({word: i + 1 for i, (word, _) in enumerate(ranked[:size])})


@dataclass(frozen=True)
class TokenSequence:
    """Fixed-length index vector; true_length counts the non-pad tail positions."""

    indices: tuple[int, ...]
    true_length: int

    def __len__(self):
        return len(self.indices)


def encode(tokens: TokenList, vocab: Vocabulary, length: int = DEFAULT_SEQ_LEN) -> TokenSequence:
    """Map tokens to indices (0 when OOV), pre-pad with 0, pre-truncate to the last `length`."""
    if length < 1:
        raise InputError("sequence length must be >= 1")
    raw = [vocab.index_of(token) for token in tokens]
    if len(raw) >= length:
        kept = raw[len(raw) - length:]
    else:
        kept = [0] * (length - len(raw)) + raw
    return TokenSequence(tuple(kept), min(len(raw), length))
