"""Shared fixtures: bundled assets, a deterministic stub classifier, engines."""

import pytest

from beliefdialog.classifier.network import BeliefDistribution
from beliefdialog.defaults import asset_path, build_engine
from beliefdialog.engine import load_rules
from beliefdialog.extraction import load_fact_rules, load_lexicon
from beliefdialog.kb import load_ontology
from beliefdialog.text import load_entity_lexicon, load_stopwords

TABLE1_SCRIPT = [
    "I am a junior year student with interest in statistics and data analysis",
    "I would prefer a class with lighter workload and higher helpfulness rating",
    "I prefer morning classes as I sleep early at night.",
]


class StubClassifier:
    """Always returns the same label; keeps dialog tests deterministic."""

    labels = ("curious", "confused", "neutral")

    def __init__(self, label="curious"):
        self.label = label

    def predict(self, text):
        probs = tuple(0.8 if lab == self.label else 0.1 for lab in self.labels)
        return BeliefDistribution(self.labels, probs)


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords(asset_path("stopwords"))


@pytest.fixture(scope="session")
def entity_patterns():
    return load_entity_lexicon(asset_path("entities"))


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(asset_path("lexicon"))


@pytest.fixture(scope="session")
def fact_rules():
    return load_fact_rules(asset_path("fact_rules"))


@pytest.fixture(scope="session")
def rulebase():
    return load_rules(asset_path("rules"))


@pytest.fixture(scope="session")
def graph():
    return load_ontology(asset_path("ontology"))


@pytest.fixture()
def curious_engine():
    return build_engine(classifier=StubClassifier("curious"))


@pytest.fixture()
def confused_engine():
    return build_engine(classifier=StubClassifier("confused"))
