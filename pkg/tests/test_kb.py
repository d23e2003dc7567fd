import random

import pytest

from beliefdialog.engine import fact
from beliefdialog.errors import ConfigError, InputError, RuleParseError
from beliefdialog.kb import (
    KnowledgeGraph,
    QueryPattern,
    TripleFact,
    course_search,
    enrich,
    parse_ontology,
    query,
)


class TestParseOntology:
    def test_single_line(self):
        graph = parse_ontology("stats250 workload light\n")
        assert len(graph) == 1
        assert TripleFact("stats250", "workload", "light") in graph.triples

    def test_empty_file(self):
        assert len(parse_ontology("")) == 0

    def test_quoted_literal_with_spaces(self):
        graph = parse_ontology('stats250 title "Statistics and Data Analysis"\n')
        assert graph.courses["stats250"].title == "Statistics and Data Analysis"

    def test_bundled_graph_contains_stats250(self, graph):
        record = graph.courses["stats250"]
        assert record.title == "Statistics and Data Analysis"
        assert record.easiness == "high"
        assert record.workload == "light"

    def test_duplicates_collapse(self):
        graph = parse_ontology("c1 workload light\nc1 workload light\n")
        assert len(graph) == 1

    def test_malformed_line_reports_line_number(self):
        with pytest.raises(RuleParseError, match="line 2"):
            parse_ontology("c1 workload light\nc2 workload\n")

    def test_unknown_enum_value_rejected(self):
        with pytest.raises(ConfigError, match="workload"):
            parse_ontology("c1 workload enormous\n")

    def test_comments_ignored(self):
        graph = parse_ontology("# header\nc1 workload light  # trailing\n")
        assert len(graph) == 1


class TestQuery:
    def test_variable_binding(self, graph):
        results = query(graph, QueryPattern("C", "workload", "light"))
        assert {"C": "stats250"} in results

    def test_empty_graph(self):
        assert query(KnowledgeGraph(set()), QueryPattern("X", "Y", "Z")) == []

    def test_ground_pattern_in_graph(self, graph):
        assert query(graph, QueryPattern("stats250", "workload", "light")) == [{}]

    def test_ground_pattern_absent(self, graph):
        assert query(graph, QueryPattern("stats250", "workload", "heavy")) == []

    def test_deterministic_sorted_order(self, graph):
        results = query(graph, QueryPattern("C", "topic", "T"))
        pairs = [(b["C"], b["T"]) for b in results]
        assert pairs == sorted(pairs)

    def test_equals_brute_force_scan(self):
        rng = random.Random(6)
        subjects = [f"c{i}" for i in range(8)]
        predicates = ["workload", "timing", "topic"]
        objects = ["light", "heavy", "morning", "evening", "statistics"]
        triples = {TripleFact(rng.choice(subjects), rng.choice(predicates), rng.choice(objects))
                   for _ in range(60)}
        graph = KnowledgeGraph(triples)
        for pattern in (QueryPattern("S", "workload", "O"), QueryPattern("c1", "P", "O"),
                        QueryPattern("S", "P", "light"), QueryPattern("S", "P", "O")):
            got = query(graph, pattern)
            expected = []
            for t in sorted(triples, key=lambda t: (t.subject, t.predicate, t.object)):
                binding = {}
                ok = True
                components = (pattern.subject, pattern.predicate, pattern.object)
                for var, value in zip(components, t):
                    if var[0].isupper():
                        if binding.get(var, value) != value:
                            ok = False
                            break
                        binding[var] = value
                    elif var != value:
                        ok = False
                        break
                if ok:
                    expected.append(binding)
            assert got == expected


class TestCourseSearch:
    def test_table_constraints_single_match(self, graph):
        matches = course_search(graph, {("workload", "light"), ("timing", "morning"),
                                        ("topic", "statistics")})
        assert [record.code for record in matches] == ["stats250"]

    def test_empty_constraints_return_all_ranked(self, graph):
        matches = course_search(graph, set())
        assert len(matches) == len(graph.courses)
        ranks = {"low": 0, "medium": 1, "high": 2}
        easiness = [ranks[record.easiness] for record in matches]
        assert easiness == sorted(easiness, reverse=True)

    def test_unsatisfiable(self, graph):
        assert course_search(graph, {("workload", "light"), ("workload", "heavy")}) == []

    def test_unknown_attribute_rejected(self, graph):
        with pytest.raises(InputError):
            course_search(graph, {("semester", "junior")})

    def test_tie_break_on_two_satisfying_courses(self):
        graph = parse_ontology(
            "aaa200 easiness high\naaa200 helpfulness medium\naaa200 workload light\n"
            "zzz100 easiness high\nzzz100 helpfulness high\nzzz100 workload light\n"
        )
        matches = course_search(graph, {("workload", "light")})
        # equal easiness, helpfulness high beats medium; code breaks exact ties
        assert [record.code for record in matches] == ["zzz100", "aaa200"]

    def test_brute_force_filter_equivalence(self, graph):
        constraints = {("workload", "light")}
        got = {record.code for record in course_search(graph, constraints)}
        expected = {code for code, record in graph.courses.items()
                    if record.workload == "light"}
        assert got == expected


class TestEnrich:
    def test_mentioned_course_gains_attributes(self, graph):
        facts = frozenset({fact("preference", "stats250", "liked")})
        enriched = enrich(facts, graph)
        assert fact("course_load", "stats250", "light") in enriched
        assert fact("course_easiness", "stats250", "high") in enriched

    def test_no_course_mentions_unchanged(self, graph):
        facts = frozenset({fact("belief", "student", "curious")})
        assert enrich(facts, graph) == facts

    def test_monotone(self, graph):
        facts = frozenset({fact("belief", "student", "curious"),
                           fact("interest", "eecs445")})
        assert facts <= enrich(facts, graph)

    def test_idempotent(self, graph):
        facts = frozenset({fact("interest", "stats250"), fact("interest", "bio172")})
        once = enrich(facts, graph)
        assert enrich(once, graph) == once
