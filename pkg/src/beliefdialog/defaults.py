"""Bundled data assets and the default engine assembly."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .classifier import NaiveBayesClassifier, read_corpus_file
from .dialog import DialogEngine, load_fsm, load_policy
from .engine import load_rules
from .extraction import load_fact_rules, load_lexicon
from .kb import load_ontology
from .text import load_entity_lexicon, load_stopwords

ASSET_NAMES = {
    "stopwords": "stopwords.txt",
    "entities": "entities.txt",
    "lexicon": "lexicon.txt",
    "fact_rules": "fact_rules.txt",
    "rules": "epistemic_rules.dl",
    "ontology": "ontology.txt",
    "fsm": "fsm.ini",
    "policy": "policy.ini",
    "corpus": "corpus.tsv",
}


def asset_path(name: str) -> Path:
    """Filesystem path of a bundled asset (stopwords, lexicon, fsm, ...)."""
    return Path(resources.files("beliefdialog.data") / ASSET_NAMES[name])


def default_classifier(stopwords=None, entity_lexicon=None) -> NaiveBayesClassifier:
    """Naive-Bayes classifier trained on the bundled corpus; loads in milliseconds."""
    stopwords = load_stopwords(asset_path("stopwords")) if stopwords is None else stopwords
    if entity_lexicon is None:
        entity_lexicon = load_entity_lexicon(asset_path("entities"))
    corpus = read_corpus_file(asset_path("corpus"))
    return NaiveBayesClassifier.fit(corpus, stopwords, entity_lexicon)


def build_engine(classifier=None, *, lexicon_path=None, fact_rules_path=None,
                 rules_path=None, ontology_path=None, fsm_path=None,
                 policy_path=None) -> DialogEngine:
    """Assemble a DialogEngine, defaulting every asset to the bundled one."""
    if classifier is None:
        classifier = default_classifier()
    return DialogEngine(
        classifier=classifier,
        lexicon=load_lexicon(lexicon_path or asset_path("lexicon")),
        fact_rules=load_fact_rules(fact_rules_path or asset_path("fact_rules")),
        rulebase=load_rules(rules_path or asset_path("rules")),
        graph=load_ontology(ontology_path or asset_path("ontology")),
        fsm=load_fsm(fsm_path or asset_path("fsm")),
        policy=load_policy(policy_path or asset_path("policy")),
    )
