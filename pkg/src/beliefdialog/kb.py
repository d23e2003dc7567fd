"""Domain ontology: course records loaded from a line-oriented triple file.

File format: `subject predicate object`, whitespace separated, the object
may be double-quoted to hold a multiword literal, '#' starts a comment.
Attribute predicates are a closed schema with 3-level ordinal scales.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .engine import Fact, Literal, Var, unify
from .errors import ConfigError, InputError, RuleParseError

ATTRIBUTE_VALUES = {
    "easiness": ("low", "medium", "high"),
    "workload": ("light", "medium", "heavy"),
    "class_size": ("small", "medium", "large"),
    "timing": ("morning", "afternoon", "evening"),
    "helpfulness": ("low", "medium", "high"),
}
SCHEMA_PREDICATES = ("title", "easiness", "workload", "class_size", "timing", "helpfulness", "topic")

# Predicate names under which course attributes re-enter the fact store.
FACT_PREDICATES = {
    "workload": "course_load",
    "easiness": "course_easiness",
    "class_size": "course_class_size",
    "timing": "course_timing",
    "helpfulness": "course_helpfulness",
    "topic": "course_topic",
    "title": "course_title",
}

_TRIPLE_TOKEN = re.compile(r'"([^"]*)"|(\S+)')
_ATOM = re.compile(r"[a-z][a-z0-9_]*")


@dataclass(frozen=True)
class TripleFact:
    subject: str
    predicate: str
    object: str

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))


@dataclass
class CourseRecord:
    code: str
    title: str | None = None
    easiness: str | None = None
    workload: str | None = None
    class_size: str | None = None
    timing: str | None = None
    helpfulness: str | None = None
    topics: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class QueryPattern:
    """Triple pattern; uppercase-initial strings act as variables."""

    subject: str
    predicate: str
    object: str

    def as_literal(self) -> Literal:
        def term(component):
            if component and component[0].isupper() and " " not in component:
                return Var(component)
            return component

        return Literal("triple", (term(self.subject), term(self.predicate), term(self.object)))


class KnowledgeGraph:
    """Immutable set of triples plus the course records materialized from them."""

    def __init__(self, triples):
        self.triples = frozenset(triples)
        self.courses = _materialize_courses(self.triples)

    def __len__(self):
        return len(self.triples)

    def sorted_triples(self) -> list[TripleFact]:
        return sorted(self.triples, key=lambda t: (t.subject, t.predicate, t.object))


def _split_triple_line(line: str, lineno: int) -> list[str] | None:
    body = []
    in_quote = False
    cleaned = []
    for ch in line:
        if ch == '"':
            in_quote = not in_quote
        if ch == "#" and not in_quote:
            break
        cleaned.append(ch)
    text = "".join(cleaned).strip()
    if not text:
        return None
    for match in _TRIPLE_TOKEN.finditer(text):
        body.append(match.group(1) if match.group(1) is not None else match.group(2))
    if len(body) != 3:
        raise RuleParseError(f"expected 3 fields, found {len(body)}", lineno)
    return body


def parse_ontology(text: str) -> KnowledgeGraph:
    triples = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = _split_triple_line(line, lineno)
        if fields is None:
            continue
        subject, predicate, obj = fields
        for atom in (subject, predicate):
            if not _ATOM.fullmatch(atom):
                raise RuleParseError(f"{atom!r} is not a lowercase atom", lineno)
        if predicate in ATTRIBUTE_VALUES and obj not in ATTRIBUTE_VALUES[predicate]:
            raise ConfigError(
                f"line {lineno}: {predicate} value {obj!r} not in {ATTRIBUTE_VALUES[predicate]}"
            )
        triples.add(TripleFact(subject, predicate, obj))
    return KnowledgeGraph(triples)


def load_ontology(path) -> KnowledgeGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_ontology(fh.read())


def _materialize_courses(triples) -> dict[str, CourseRecord]:
    courses: dict[str, CourseRecord] = {}
    for triple in sorted(triples, key=lambda t: (t.subject, t.predicate, t.object)):
        if triple.predicate not in SCHEMA_PREDICATES:
            continue
        record = courses.setdefault(triple.subject, CourseRecord(code=triple.subject))
        if triple.predicate == "topic":
            record.topics.append(triple.object)
        else:
            setattr(record, triple.predicate, triple.object)
    return courses


def query(graph: KnowledgeGraph, pattern: QueryPattern) -> list[dict]:
    """All variable bindings under which the pattern is a triple of the graph.

    Results are ordered by the matched triple (subject, predicate, object).
    """
    literal = pattern.as_literal()
    bindings = []
    for triple in graph.sorted_triples():
        ground = Literal("triple", tuple(triple))
        result = unify(literal, ground, {})
        if result is not None:
            bindings.append(result)
    return bindings


_ORDINAL_RANK = {value: rank for values in ATTRIBUTE_VALUES.values() for rank, value in enumerate(values)}


def course_search(graph: KnowledgeGraph, constraints) -> list[CourseRecord]:
    """Hard-filter courses on every (attribute, value) constraint.

    Ranked by easiness descending, helpfulness descending, then code.
    Attributes are the CourseRecord schema; `topic` matches membership.
    """
    searchable = set(ATTRIBUTE_VALUES) | {"topic"}
    for attribute, _ in constraints:
        if attribute not in searchable:
            raise InputError(f"unknown course attribute {attribute!r}")

    def satisfies(record: CourseRecord) -> bool:
        for attribute, value in constraints:
            if attribute == "topic":
                if value not in record.topics:
                    return False
            elif getattr(record, attribute) != value:
                return False
        return True

    matches = [record for record in graph.courses.values() if satisfies(record)]
    matches.sort(
        key=lambda r: (
            -_ORDINAL_RANK.get(r.easiness, -1),
            -_ORDINAL_RANK.get(r.helpfulness, -1),
            r.code,
        )
    )
    return matches


def enrich(facts, graph: KnowledgeGraph) -> frozenset:
    """Add the attribute facts of every course mentioned in the fact store.

    Course attributes re-enter as e.g. course_load(stats250, light); the
    operation is monotone and idempotent.
    """
    mentioned = set()
    for f in facts:
        for arg in f.args:
            if isinstance(arg, str) and arg in graph.courses:
                mentioned.add(arg)
    added = set(facts)
    for code in sorted(mentioned):
        for triple in graph.sorted_triples():
            if triple.subject == code and triple.predicate in FACT_PREDICATES:
                added.add(Fact(FACT_PREDICATES[triple.predicate], (code, triple.object)))
    return frozenset(added)
