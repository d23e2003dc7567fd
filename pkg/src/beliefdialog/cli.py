"""Command-line interface: train, eval, infer, extract, reason, chat, serve.

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime
error. Every subcommand maps onto module operations so the whole engine
is scriptable without the HTTP service.
"""

from __future__ import annotations

import argparse
import json
import sys

from .classifier import (
    BeliefModel,
    LstmClassifier,
    TrainConfig,
    evaluate,
    load_model,
    read_corpus_file,
    save_model,
    train,
)
from .defaults import asset_path, build_engine, default_classifier
from .dialog import DialogEngine
from .engine import fact_sort_key, forward_chain, load_facts, load_rules
from .errors import BeliefDialogError, ConfigError
from .extraction import assert_facts, extract_triples, load_fact_rules, load_lexicon
from .text import load_entity_lexicon, load_stopwords

DEFAULT_LABELS = ("curious", "confused", "neutral")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_app_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config file must hold a JSON object")
    return config


def _classifier_from(config: dict, model_path=None):
    stopwords = load_stopwords(config.get("stopwords", asset_path("stopwords")))
    entities = load_entity_lexicon(config.get("entities", asset_path("entities")))
    path = model_path or config.get("model")
    if path:
        return LstmClassifier(load_model(path), stopwords, entities)
    return default_classifier(stopwords, entities)


def _engine_from(config: dict, model_path=None) -> DialogEngine:
    # every referenced file must load before anything runs (fail fast)
    try:
        return build_engine(
            classifier=_classifier_from(config, model_path),
            lexicon_path=config.get("lexicon"),
            fact_rules_path=config.get("fact_rules"),
            rules_path=config.get("rules"),
            ontology_path=config.get("ontology"),
            fsm_path=config.get("fsm"),
            policy_path=config.get("policy"),
        )
    except OSError as exc:
        raise ConfigError(f"cannot load configured asset: {exc}") from exc


def cmd_train(args) -> int:
    corpus = read_corpus_file(args.corpus or asset_path("corpus"))
    cfg = TrainConfig(epochs=args.epochs, rng_seed=args.seed)
    stopwords = load_stopwords(asset_path("stopwords"))
    entities = load_entity_lexicon(asset_path("entities"))
    (params, vocab), report = train(corpus, cfg, DEFAULT_LABELS, stopwords, entities)
    for stats in report.epochs:
        print(f"epoch {stats.epoch:3d}  loss {stats.loss:.4f}  accuracy {stats.accuracy:.3f}")
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    model = BeliefModel(DEFAULT_LABELS, vocab, params, cfg.seq_len)
    save_model(model, args.out)
    print(f"saved model to {args.out} (train {report.train_size}, held out {report.test_size})")
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    corpus = read_corpus_file(args.corpus)
    stopwords = load_stopwords(asset_path("stopwords"))
    entities = load_entity_lexicon(asset_path("entities"))
    accuracy, confusion = evaluate(model.params, model.vocab, corpus, model.labels,
                                   model.seq_len, stopwords, entities)
    print(f"accuracy {accuracy:.4f} on {len(corpus)} examples")
    width = max(len(label) for label in model.labels)
    header = " ".join(f"{label:>{width}}" for label in model.labels)
    print(f"{'':>{width}} {header}")
    for row_label, row in zip(model.labels, confusion):
        cells = " ".join(f"{cell:>{width}}" for cell in row)
        print(f"{row_label:>{width}} {cells}")
    return 0


def cmd_infer(args) -> int:
    config = _load_app_config(args.config)
    classifier = _classifier_from(config, args.model)
    dist = classifier.predict(args.text)
    for label, prob in zip(dist.labels, dist.probs):
        marker = " <-" if label == dist.top_label else ""
        print(f"{label:10s} {prob:.4f}{marker}")
    return 0


def cmd_extract(args) -> int:
    lexicon = load_lexicon(args.lexicon or asset_path("lexicon"))
    rules = load_fact_rules(args.rules or asset_path("fact_rules"))
    verb_classes = frozenset(rule.verb_class for rule in rules)
    triples = extract_triples(args.text, lexicon, verb_classes)
    for triple in triples:
        print(f"({triple.subject}, {triple.verb}, {triple.object})")
    for f in sorted(assert_facts(triples, rules, lexicon), key=fact_sort_key):
        print(f)
    return 0


def cmd_reason(args) -> int:
    rules = load_rules(args.rules)
    facts = load_facts(args.facts)
    result = forward_chain(rules, facts)
    for f in sorted(result.derived, key=fact_sort_key):
        print(f)
    if args.trace:
        print("--- trace ---", file=sys.stderr)
        for entry in result.trace:
            produced = ", ".join(map(str, entry.produced))
            print(f"{entry.rule_id} {entry.binding} => {produced}", file=sys.stderr)
    return 0


def cmd_chat(args) -> int:
    engine = _engine_from(_load_app_config(args.config), args.model)
    session = engine.new_session("cli")
    print(f"advisor: {session.transcript[0].text}")
    while session.status == "active":
        try:
            text = input("you: ").strip()
        except (EOFError, KeyboardInterrupt):
            print()
            return 0
        if not text:
            continue
        reply = engine.process_turn(session, text)
        if args.verbose:
            belief = ", ".join(f"{l}={p:.2f}" for l, p in zip(reply.belief.labels, reply.belief.probs))
            print(f"  [belief {belief} | fired {list(reply.fired_rules)} | "
                  f"skipped {list(reply.skipped_states)} | slots {reply.slots}]")
        print(f"advisor: {reply.text}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import SessionStore, create_app

    config = _load_app_config(args.config)
    engine = _engine_from(config, args.model)
    journal = args.journal or config.get("journal", "sessions.jsonl")
    store = SessionStore(engine, journal)
    port = args.port or int(config.get("port", 8714))
    uvicorn.run(create_app(store), host=args.host, port=port, log_level="warning")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="beliefdialog", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the LSTM classifier")
    p.add_argument("--corpus", help="label<TAB>utterance file (default: bundled)")
    p.add_argument("--out", default="model.bin")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="evaluate a trained model on a corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("infer", help="classify one utterance")
    p.add_argument("--text", required=True)
    p.add_argument("--model")
    p.add_argument("--config")
    p.set_defaults(fn=cmd_infer)

    p = sub.add_parser("extract", help="extract triples and facts from an utterance")
    p.add_argument("--text", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--rules")
    p.set_defaults(fn=cmd_extract)

    p = sub.add_parser("reason", help="forward-chain a rulebase over a fact file")
    p.add_argument("--rules", required=True)
    p.add_argument("--facts", required=True)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(fn=cmd_reason)

    p = sub.add_parser("chat", help="interactive advisor REPL")
    p.add_argument("--model")
    p.add_argument("--config")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(fn=cmd_chat)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--config")
    p.add_argument("--model")
    p.add_argument("--journal")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int)
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (BeliefDialogError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
