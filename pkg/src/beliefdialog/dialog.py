"""FSM dialog policy: per-turn orchestration of the whole pipeline.

Each turn runs classify -> extract -> assert -> enrich -> add belief fact
-> forward chain -> directives -> slot filling -> weight update -> state
partition, then replies with the first ask-state prompt or, when no ask
states remain, a course recommendation. Sessions mutate only after the
whole turn has succeeded, so a failed turn leaves no trace.
"""

from __future__ import annotations

import configparser
import copy
import time
from dataclasses import dataclass, field

from .engine import (
    DirectiveSet,
    Fact,
    Limits,
    RuleBase,
    derive_directives,
    fact_sort_key,
    forward_chain,
)
from .errors import ConfigError, InputError, ResourceLimitError
from .extraction import SynonymLexicon, assert_facts, extract_triples
from .kb import KnowledgeGraph, course_search, enrich
from .text import Utterance, tokenize

UNSPECIFIED = "unspecified"


@dataclass(frozen=True)
class FsmState:
    id: str
    prompt: str = ""
    slot: str | None = None
    slot_attribute: str | None = None
    default_weight: float = 1.0
    order: int = 0
    terminal: bool = False


class FSM:
    def __init__(self, states: list[FsmState], greeting: str = "Hello!"):
        ids = [state.id for state in states]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate state id in FSM")
        terminals = [state for state in states if state.terminal]
        if len(terminals) != 1:
            raise ConfigError(f"FSM must have exactly one terminal state, found {len(terminals)}")
        orders = [state.order for state in states]
        if len(set(orders)) != len(orders):
            raise ConfigError("state orders must be distinct")
        for state in states:
            if not state.terminal and not state.prompt:
                raise ConfigError(f"non-terminal state {state.id} has no prompt")
        self.states = {state.id: state for state in states}
        self.ordered = sorted(states, key=lambda s: s.order)
        self.greeting = greeting

    def __contains__(self, state_id: str) -> bool:
        return state_id in self.states

    def non_terminal(self) -> list[FsmState]:
        return [state for state in self.ordered if not state.terminal]

    def slot_owner(self, slot: str) -> FsmState | None:
        for state in self.ordered:
            if state.slot == slot:
                return state
        return None


def load_fsm(path) -> FSM:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        read = parser.read(path, encoding="utf-8")
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate FSM section: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed FSM file: {exc}") from exc
    if not read:
        raise ConfigError(f"cannot read FSM file {path}")
    greeting = parser.get("fsm", "greeting", fallback="Hello!")
    states = []
    for section in parser.sections():
        if not section.startswith("state "):
            continue
        state_id = section.split(None, 1)[1].strip()
        try:
            states.append(FsmState(
                id=state_id,
                prompt=parser.get(section, "prompt", fallback=""),
                slot=parser.get(section, "slot", fallback=None),
                slot_attribute=parser.get(section, "slot_attribute", fallback=None),
                default_weight=parser.getfloat(section, "weight", fallback=1.0),
                order=parser.getint(section, "order", fallback=len(states)),
                terminal=parser.getboolean(section, "terminal", fallback=False),
            ))
        except ValueError as exc:
            raise ConfigError(f"bad value in FSM section [{section}]: {exc}") from exc
    return FSM(states, greeting)


@dataclass
class PolicyConfig:
    threshold: float = 0.5
    belief_weight_table: dict = field(default_factory=dict)
    skip_weight: float = 0.0
    ask_weight: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("threshold must be in [0, 1]")


def load_policy(path) -> PolicyConfig:
    parser = configparser.ConfigParser(interpolation=None)
    if not parser.read(path, encoding="utf-8"):
        raise ConfigError(f"cannot read policy file {path}")
    threshold = parser.getfloat("policy", "threshold", fallback=0.5)
    table: dict[str, dict[str, float]] = {}
    for section in parser.sections():
        if not section.startswith("weights "):
            continue
        label = section.split(None, 1)[1].strip()
        table[label] = {state: float(delta) for state, delta in parser.items(section)}
    return PolicyConfig(threshold=threshold, belief_weight_table=table)


@dataclass
class TranscriptEntry:
    speaker: str
    text: str
    ts: float
    payload: dict | None = None


@dataclass
class DialogSession:
    id: str
    weights: dict[str, float]
    slots: dict[str, str] = field(default_factory=dict)
    belief_history: list = field(default_factory=list)
    facts: frozenset = frozenset()
    transcript: list[TranscriptEntry] = field(default_factory=list)
    status: str = "active"
    last_asked: str | None = None
    turn_count: int = 0


@dataclass(frozen=True)
class AdvisorReply:
    text: str
    belief: object
    fired_rules: tuple[str, ...]
    skipped_states: tuple[str, ...]
    asked_state: str | None
    slots: dict
    status: str
    warnings: tuple[str, ...] = ()
    turn_index: int = 0


def update_weights(session: DialogSession, directives: DirectiveSet, belief_label: str,
                   cfg: PolicyConfig, fsm: FSM) -> tuple[dict[str, float], list[str]]:
    """Belief deltas, then skip/ask overrides (ask wins), clamped to [0, 1]."""
    weights = dict(session.weights)
    warnings = []
    for state_id, delta in sorted(cfg.belief_weight_table.get(belief_label, {}).items()):
        if state_id not in fsm:
            warnings.append(f"weight table names unknown state {state_id}")
            continue
        weights[state_id] = weights.get(state_id, 0.0) + delta
    for state_id in sorted(directives.skip):
        if state_id not in fsm:
            warnings.append(f"skipstate directive names unknown state {state_id}")
            continue
        weights[state_id] = cfg.skip_weight
    for state_id in sorted(directives.ask):
        if state_id not in fsm:
            warnings.append(f"askstate directive names unknown state {state_id}")
            continue
        weights[state_id] = cfg.ask_weight
    return {state: min(1.0, max(0.0, weight)) for state, weight in weights.items()}, warnings


def partition_states(fsm: FSM, session: DialogSession,
                     cfg: PolicyConfig) -> tuple[list[FsmState], list[FsmState]]:
    """Split unfilled non-terminal states into ask (>= threshold) and skip lists."""
    ask, skip = [], []
    for state in fsm.non_terminal():
        if state.slot is not None and state.slot in session.slots:
            continue
        weight = session.weights.get(state.id, state.default_weight)
        (ask if weight >= cfg.threshold else skip).append(state)
    return ask, skip


@dataclass
class DialogEngine:
    """Immutable per-deployment dependencies shared by every session."""

    classifier: object
    lexicon: SynonymLexicon
    fact_rules: tuple
    rulebase: RuleBase
    graph: KnowledgeGraph
    fsm: FSM
    policy: PolicyConfig
    limits: Limits = field(default_factory=Limits)

    @property
    def verb_classes(self) -> frozenset[str]:
        return frozenset(rule.verb_class for rule in self.fact_rules)

    def new_session(self, session_id: str, ts: float | None = None) -> DialogSession:
        ts = time.time() if ts is None else ts
        session = DialogSession(
            id=session_id,
            weights={state.id: state.default_weight for state in self.fsm.ordered},
        )
        session.transcript.append(TranscriptEntry("advisor", self.fsm.greeting, ts))
        return session

    def process_turn(self, session: DialogSession, text: str,
                     ts: float | None = None) -> AdvisorReply:
        if session.status != "active":
            raise InputError(f"session {session.id} is not active")
        ts = time.time() if ts is None else ts
        draft = copy.deepcopy(session)
        reply = self._run_turn(draft, text, ts)
        for name in ("weights", "slots", "belief_history", "facts", "transcript",
                     "status", "last_asked", "turn_count"):
            setattr(session, name, getattr(draft, name))
        return reply

    def _run_turn(self, session: DialogSession, text: str, ts: float) -> AdvisorReply:
        warnings: list[str] = []
        turn = session.turn_count + 1
        utterance = Utterance(text, turn_index=turn)

        dist = self.classifier.predict(text)
        label = dist.top_label

        triples = extract_triples(utterance, self.lexicon, self.verb_classes)
        new_facts = assert_facts(triples, self.fact_rules, self.lexicon)
        facts = enrich(session.facts | new_facts, self.graph)
        facts = facts | {Fact("belief", ("student", label))}

        degraded = False
        try:
            result = forward_chain(self.rulebase, facts, self.limits)
            directives = derive_directives(result)
        except ResourceLimitError as exc:
            warnings.append(f"inference limits exceeded: {exc}")
            result = exc.partial
            directives = DirectiveSet()
            degraded = True

        fired = result.fired_rule_ids if result is not None else ()
        session.facts = result.derived if result is not None else facts

        self._fill_slots(session, directives, text, warnings)

        if degraded:
            pending = [state for state in self.fsm.non_terminal()
                       if state.slot is None or state.slot not in session.slots]
            reply_text, asked = (pending[0].prompt, pending[0].id) if pending \
                else (self._recommend_text(session), None)
            skipped: tuple[str, ...] = ()
        else:
            session.weights, weight_warnings = update_weights(
                session, directives, label, self.policy, self.fsm)
            warnings.extend(weight_warnings)
            ask_states, skip_states = partition_states(self.fsm, session, self.policy)
            skipped = tuple(sorted(directives.skip | {state.id for state in skip_states}))
            if ask_states:
                reply_text, asked = ask_states[0].prompt, ask_states[0].id
            else:
                reply_text, asked = self._recommend_text(session), None

        session.belief_history.append((turn, dist))
        session.turn_count = turn
        session.last_asked = asked
        if asked is None:
            session.status = "completed"
        reply = AdvisorReply(
            text=reply_text,
            belief=dist,
            fired_rules=tuple(fired),
            skipped_states=skipped,
            asked_state=asked,
            slots=dict(session.slots),
            status=session.status,
            warnings=tuple(warnings),
            turn_index=turn,
        )
        session.transcript.append(TranscriptEntry("user", text, ts))
        session.transcript.append(TranscriptEntry("advisor", reply_text, ts, payload={
            "belief": {"labels": list(dist.labels), "probs": list(dist.probs),
                       "label": dist.top_label},
            "fired_rules": list(reply.fired_rules),
            "skipped_states": list(reply.skipped_states),
            "asked_state": asked,
            "slots": dict(session.slots),
        }))
        return reply

    def _fill_slots(self, session: DialogSession, directives: DirectiveSet,
                    text: str, warnings: list[str]) -> None:
        def fill(slot: str, value) -> None:
            value = str(value)
            if slot in session.slots:
                if session.slots[slot] != value:
                    warnings.append(
                        f"slot {slot} already holds {session.slots[slot]!r}; "
                        f"ignoring refill {value!r}")
                return
            session.slots[slot] = value

        for slot, value in directives.slot_fills:
            if self.fsm.slot_owner(slot) is None:
                warnings.append(f"slot_fill directive names unknown slot {slot}")
                continue
            fill(slot, value)

        for f in sorted(session.facts, key=fact_sort_key):
            if f.predicate == "preference" and len(f.args) == 2:
                slot = str(f.args[0])
                if self.fsm.slot_owner(slot) is not None:
                    fill(slot, f.args[1])

        # An answered question always resolves its slot, so the dialog advances
        # even when the reply carries no extractable value.
        if session.last_asked is not None:
            state = self.fsm.states.get(session.last_asked)
            if state is not None and state.slot is not None and state.slot not in session.slots:
                value = UNSPECIFIED
                if state.slot_attribute:
                    for attribute, found in self.lexicon.scan(tokenize(text)):
                        if attribute == state.slot_attribute:
                            value = found
                            break
                fill(state.slot, value)

    def _constraints(self, session: DialogSession) -> list[tuple[str, str]]:
        constraints = set()
        for state in self.fsm.ordered:
            if state.slot and state.slot_attribute:
                value = session.slots.get(state.slot)
                if value and value != UNSPECIFIED:
                    constraints.add((state.slot_attribute, value))
        for f in session.facts:
            if f.predicate == "recommend_constraint" and len(f.args) == 2:
                constraints.add((str(f.args[0]), str(f.args[1])))
        return sorted(constraints)

    def _recommend_text(self, session: DialogSession) -> str:
        constraints = self._constraints(session)
        matches = course_search(self.graph, constraints)
        if not matches:
            wanted = ", ".join(f"{attr}={value}" for attr, value in constraints) or "none"
            return ("I am sorry, I could not find a course matching your preferences "
                    f"({wanted}). Maybe relax one of them?")
        top = matches[0]
        title = f' "{top.title}"' if top.title else ""
        tail = " which is an easy course." if top.easiness == "high" else "."
        return f"I would advise you {top.code.upper()}{title}{tail}"

    def recommend(self, session: DialogSession) -> str:
        """Recommendation text for the session's current slots and constraints."""
        return self._recommend_text(session)
