from fractions import Fraction

import pytest

from beliefdialog.classifier.bayes import nb_predict, nb_train
from beliefdialog.errors import InputError
from beliefdialog.text import TokenList

SIX_DOCS = [
    (TokenList(("easy", "fun", "statistics")), "curious"),
    (TokenList(("explore", "statistics")), "curious"),
    (TokenList(("lost", "unsure")), "confused"),
    (TokenList(("unsure", "deadline", "stress")), "confused"),
    (TokenList(("schedule", "credits")), "neutral"),
    (TokenList(("plan", "credits", "schedule")), "neutral"),
]


def fraction_posteriors(docs, query):
    """Independent closed-form oracle in exact arithmetic."""
    labels = sorted({label for _, label in docs})
    vocab = sorted({t for tokens, _ in docs for t in tokens})
    doc_count = {label: sum(1 for _, l in docs if l == label) for label in labels}
    word_count = {label: {} for label in labels}
    totals = dict.fromkeys(labels, 0)
    for tokens, label in docs:
        for token in tokens:
            word_count[label][token] = word_count[label].get(token, 0) + 1
            totals[label] += 1
    posts = []
    for label in labels:
        p = Fraction(doc_count[label], len(docs))
        for token in query:
            p *= Fraction(word_count[label].get(token, 0) + 1, totals[label] + len(vocab))
        posts.append(p)
    norm = sum(posts)
    return labels, [p / norm for p in posts]


class TestToyCorpora:
    def test_two_class_argmax(self):
        model = nb_train([(TokenList(("cheap", "easy")), "A"), (TokenList(("hard", "heavy")), "B")])
        dist = nb_predict(model, ["easy"])
        assert dist.top_label == "A"

    def test_symmetric_corpus_unknown_query_uniform(self):
        model = nb_train([(TokenList(("left", "port")), "A"), (TokenList(("right", "starboard")), "B")])
        dist = nb_predict(model, ["mystery"])
        assert abs(dist.probs[0] - 0.5) < 1e-12
        assert abs(dist.probs[1] - 0.5) < 1e-12

    def test_empty_corpus_rejected(self):
        with pytest.raises(InputError):
            nb_train([])


class TestSixDocumentOracle:
    # frozen from the Fraction oracle below (labels confused, curious, neutral)
    FROZEN = {
        ("statistics",): (Fraction(1, 5), Fraction(3, 5), Fraction(1, 5)),
        ("unsure", "stress"): (Fraction(3, 4), Fraction(1, 8), Fraction(1, 8)),
        ("credits", "schedule", "plan"): (Fraction(1, 20), Fraction(1, 20), Fraction(9, 10)),
        ("mystery",): (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
    }

    @pytest.mark.parametrize("query", sorted(FROZEN))
    def test_matches_frozen_table(self, query):
        model = nb_train(SIX_DOCS)
        dist = nb_predict(model, list(query))
        assert dist.labels == ("confused", "curious", "neutral")
        for prob, expected in zip(dist.probs, self.FROZEN[query]):
            assert abs(prob - float(expected)) < 1e-9

    @pytest.mark.parametrize("query", sorted(FROZEN))
    def test_oracle_agrees_with_frozen_values(self, query):
        labels, posts = fraction_posteriors(SIX_DOCS, query)
        assert labels == ["confused", "curious", "neutral"]
        assert tuple(posts) == self.FROZEN[query]

    def test_posteriors_match_oracle_on_random_small_corpora(self):
        import random
        rng = random.Random(17)
        words = ["w%d" % i for i in range(8)]
        for _ in range(25):
            docs = []
            for label in ("A", "B"):
                for _ in range(rng.randint(1, 5)):
                    tokens = tuple(rng.choice(words) for _ in range(rng.randint(1, 4)))
                    docs.append((TokenList(tokens), label))
            model = nb_train(docs)
            query = [rng.choice(words + ["zz"]) for _ in range(rng.randint(1, 3))]
            labels, posts = fraction_posteriors(docs, query)
            dist = nb_predict(model, query)
            assert tuple(dist.labels) == tuple(labels)
            for prob, expected in zip(dist.probs, posts):
                assert abs(prob - float(expected)) < 1e-9
