"""Regenerate the bundled synthetic training corpus (data/corpus.tsv).

Templated student-advisor utterances, 100 per belief class, written as
`label<TAB>utterance` lines. Deterministic for a fixed seed.
"""

import random
from pathlib import Path

TOPICS = [
    "statistics", "biology", "machine learning", "history", "economics",
    "psychology", "chemistry", "programming", "philosophy", "linear algebra",
]
TIMES = ["morning", "afternoon", "evening"]

CURIOUS_TEMPLATES = [
    "i am really excited to explore {topic} courses next semester",
    "i would love to learn more about {topic} this year",
    "{topic} sounds fascinating and i am eager to dive deeper into it",
    "i am curious about the advanced {topic} electives you offer",
    "i keep wondering what a {topic} seminar would be like",
    "i am keen to discover new areas like {topic} and grow my skills",
    "learning {topic} excites me so much that i want another course",
    "i am passionate about {topic} and thrilled to pick a deeper class",
    "exploring {topic} in the {time} sounds like an amazing adventure",
    "i am eager to find out which {topic} course opens the most doors",
]
CONFUSED_TEMPLATES = [
    "i am so confused about which {topic} class i should take",
    "i have no idea how to choose between these {topic} courses",
    "i feel lost and overwhelmed by the huge {topic} course catalog",
    "i am stuck and unsure whether {topic} fits my degree plan",
    "choosing a {topic} course is unclear and stressful for me",
    "i am struggling to understand what {topic} prerequisites i am missing",
    "honestly i am torn and puzzled about the {topic} options",
    "everything about the {topic} requirements seems muddled and confusing",
    "i am worried and uncertain about handling {topic} in the {time}",
    "i cannot figure out which {topic} section i am supposed to join",
]
NEUTRAL_TEMPLATES = [
    "i need to register for a {topic} course next semester",
    "please list the {topic} classes available in the {time}",
    "i want to check the credit requirements for {topic}",
    "i am planning my schedule and {topic} is on the list",
    "put me down for the standard {topic} lecture please",
    "my advisor told me to add one {topic} course to my plan",
    "i have to complete the {topic} requirement before graduation",
    "the degree audit says i still need a {topic} credit",
    "i will take whichever {topic} section meets in the {time}",
    "sign me up for the usual {topic} class this term",
]


def generate(seed: int = 13, per_class: int = 100):
    rng = random.Random(seed)
    rows = []
    for label, templates in (
        ("curious", CURIOUS_TEMPLATES),
        ("confused", CONFUSED_TEMPLATES),
        ("neutral", NEUTRAL_TEMPLATES),
    ):
        combos = [(tpl, topic) for tpl in templates for topic in TOPICS]
        rng.shuffle(combos)
        for tpl, topic in combos[:per_class]:
            text = tpl.format(topic=topic, time=rng.choice(TIMES))
            rows.append((label, text))
    rng.shuffle(rows)
    return rows


def main():
    out = Path(__file__).resolve().parents[1] / "src" / "beliefdialog" / "data" / "corpus.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = generate()
    with open(out, "w", encoding="utf-8") as fh:
        for label, text in rows:
            fh.write(f"{label}\t{text}\n")
    print(f"wrote {len(rows)} utterances to {out}")


if __name__ == "__main__":
    main()
