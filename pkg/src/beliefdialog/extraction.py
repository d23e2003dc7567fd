"""Pattern-based (subject, verb, object) extraction and fact assertion.

The extractor is a deterministic pattern grammar: a pronoun or noun
subject, a verb from the configured verb classes (modals in between are
skipped), and the maximal phrase after the verb up to a clause-boundary
conjunction. A synonym lexicon canonicalizes surface phrases into
attribute_value atoms; fact-assertion rules then turn canonicalized
triples into ground facts.

Pre-parsed triples from an external tool can be fed through
`read_triple_file` (one `subject TAB verb TAB object` per line) and
handed straight to `assert_facts`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import Fact, Literal, Var
from .errors import ConfigError, RuleParseError
from .text import Utterance, split_sentences, tokenize

# Words that may sit between the subject and its verb.
_MODALS = frozenset({"would", "will", "can", "could", "should", "shall", "might",
                     "may", "must", "do", "does", "did", "really", "just", "also"})
# Subordinating conjunctions close off an object phrase ("and" does not).
_BOUNDARIES = frozenset({"as", "because", "since", "so", "but", "if", "when",
                         "while", "after", "before", "although", "though"})
_ARTICLES = frozenset({"a", "an", "the"})
_PRONOUNS = frozenset({"i", "we", "you", "he", "she", "they", "it"})

_ATTRIBUTES = ("class_size", "workload", "timing", "easiness", "helpfulness",
               "topic", "semester")


@dataclass(frozen=True)
class Triple:
    """One extracted (subject, verb, object) with token spans into the sentence."""

    subject: str
    verb: str
    object: str
    subject_span: tuple[int, int]
    verb_span: tuple[int, int]
    object_span: tuple[int, int]
    source_sentence: int = 0


class SynonymLexicon:
    """Surface phrase -> canonical atom (verb classes and attribute_value atoms)."""

    def __init__(self, entries: dict[str, str]):
        self.entries = {phrase.lower(): atom for phrase, atom in entries.items()}
        self.max_phrase_len = max((len(p.split()) for p in self.entries), default=1)

    def canonical_verb(self, verb: str, verb_classes: frozenset[str]) -> str | None:
        atom = self.entries.get(verb, verb)
        return atom if atom in verb_classes else None

    def scan(self, tokens) -> list[tuple[str, str]]:
        """Longest-first scan for attribute phrases; returns (attribute, value) pairs."""
        found = []
        i = 0
        tokens = list(tokens)
        while i < len(tokens):
            matched = False
            for width in range(min(self.max_phrase_len, len(tokens) - i), 0, -1):
                phrase = " ".join(tokens[i:i + width])
                atom = self.entries.get(phrase)
                pair = split_attribute_atom(atom) if atom else None
                if pair is not None:
                    found.append(pair)
                    i += width
                    matched = True
                    break
            if not matched:
                i += 1
        return found


def split_attribute_atom(atom: str) -> tuple[str, str] | None:
    """workload_light -> (workload, light); None when no schema attribute matches."""
    for attribute in _ATTRIBUTES:
        prefix = attribute + "_"
        if atom.startswith(prefix) and len(atom) > len(prefix):
            return attribute, atom[len(prefix):]
    return None


def load_lexicon(path) -> SynonymLexicon:
    """Read `surface phrase => canonical_atom` lines, '#' comments."""
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=>" not in line:
                raise RuleParseError("lexicon line must be `phrase => atom`", lineno)
            phrase, atom = (part.strip() for part in line.split("=>", 1))
            if not phrase or not atom:
                raise RuleParseError("empty phrase or atom in lexicon", lineno)
            entries[phrase] = atom
    return SynonymLexicon(entries)


@dataclass(frozen=True)
class FactAssertionRule:
    """`verb_class | attribute:Var => template` applied to canonicalized triples."""

    verb_class: str
    attribute: str
    variable: str | None
    template: Literal

    def instantiate(self, value: str) -> Fact:
        args = tuple(value if isinstance(a, Var) and a.name == self.variable else a
                     for a in self.template.args)
        return Fact(self.template.predicate, args)


def parse_fact_rules(text: str) -> tuple[FactAssertionRule, ...]:
    from .engine import _lex, _Parser  # reuse the literal grammar

    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            left, template_text = line.split("=>", 1)
            verb_class, object_pattern = (part.strip() for part in left.split("|", 1))
        except ValueError:
            raise RuleParseError("rule must be `verb_class | pattern => template`", lineno)
        if ":" in object_pattern:
            attribute, variable = (part.strip() for part in object_pattern.split(":", 1))
        else:
            attribute, variable = object_pattern, None
        if attribute not in _ATTRIBUTES:
            raise ConfigError(f"line {lineno}: unknown attribute {attribute!r} in rule pattern")
        parser = _Parser(_lex(template_text.strip()))
        template = parser.parse_literal()
        unbound = {a.name for a in template.args if isinstance(a, Var)} - ({variable} if variable else set())
        if unbound:
            raise ConfigError(
                f"line {lineno}: template variable {sorted(unbound)[0]} is not bound by the trigger"
            )
        rules.append(FactAssertionRule(verb_class, attribute, variable, template))
    return tuple(rules)


def load_fact_rules(path) -> tuple[FactAssertionRule, ...]:
    with open(path, encoding="utf-8") as fh:
        return parse_fact_rules(fh.read())


def extract_triples(utterance: Utterance | str, lexicon: SynonymLexicon,
                    verb_classes: frozenset[str] = frozenset({"prefer", "be"})) -> list[Triple]:
    """Match the pattern grammar over each sentence of the utterance."""
    raw = utterance.raw if isinstance(utterance, Utterance) else utterance
    triples = []
    for sent_index, sentence in enumerate(split_sentences(raw)):
        tokens = tokenize(sentence)
        for v, token in enumerate(tokens):
            if lexicon.canonical_verb(token, verb_classes) is None:
                continue
            s = v - 1
            while s >= 0 and tokens[s] in _MODALS:
                s -= 1
            if s < 0 or not (tokens[s] in _PRONOUNS or tokens[s].isalnum()):
                continue
            end = v + 1
            while end < len(tokens) and tokens[end] not in _BOUNDARIES:
                end += 1
            start = v + 1
            while start < end and tokens[start] in _ARTICLES | {"for"}:
                start += 1
            if start == end:
                continue
            triples.append(Triple(
                subject=tokens[s],
                verb=token,
                object=" ".join(tokens[start:end]),
                subject_span=(s, s + 1),
                verb_span=(v, v + 1),
                object_span=(start, end),
                source_sentence=sent_index,
            ))
    return triples


def assert_facts(triples, rules, lexicon: SynonymLexicon) -> frozenset:
    """Run every triple through the fact-assertion rulebase; sorted, deterministic."""
    verb_classes = frozenset(rule.verb_class for rule in rules)
    facts = set()
    for triple in triples:
        verb = lexicon.canonical_verb(triple.verb, verb_classes)
        if verb is None:
            continue
        pairs = lexicon.scan(triple.object.split())
        for rule in rules:
            if rule.verb_class != verb:
                continue
            for attribute, value in pairs:
                if attribute == rule.attribute:
                    facts.add(rule.instantiate(value))
    return frozenset(facts)


def read_triple_file(path) -> list[Triple]:
    """Adapter for external parsers: one `subject TAB verb TAB object` per line."""
    triples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise RuleParseError("expected subject TAB verb TAB object", lineno)
            subject, verb, obj = (part.strip().lower() for part in parts)
            triples.append(Triple(subject, verb, obj, (0, 1), (1, 2),
                                  (2, 2 + len(obj.split())), lineno - 1))
    return triples
