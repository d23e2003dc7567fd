"""Horn-clause rule DSL and bottom-up forward chaining to a fixpoint.

The rule language is a Datalog subset: positive conjunctive bodies,
multi-literal heads, no negation and no function symbols, so every
rulebase terminates and the derived set is independent of rule order.

Grammar ('%' starts a comment):

    rule    := body "=>" head "."
    body    := literal ("&" literal)*
    head    := literal ("," literal)*
    literal := atom "(" term ("," term)* ")"
    term    := atom | Variable | number | quoted-literal
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ConfigError, ResourceLimitError, RuleParseError, SafetyError


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return self.name


Term = object  # atoms and quoted literals are str, numbers int/float, variables Var


@dataclass(frozen=True)
class Literal:
    predicate: str
    args: tuple

    def __repr__(self):
        return f"{self.predicate}({', '.join(map(_format_term, self.args))})"

    @property
    def is_ground(self) -> bool:
        return not any(isinstance(a, Var) for a in self.args)

    def variables(self) -> set[str]:
        return {a.name for a in self.args if isinstance(a, Var)}


def fact(predicate: str, *args) -> Literal:
    """Convenience constructor for a ground literal."""
    lit = Literal(predicate, tuple(args))
    if not lit.is_ground:
        raise ConfigError(f"fact {lit!r} contains variables")
    return lit


# A fact is simply a ground Literal; a FactStore is a frozenset of them.
Fact = Literal
FactStore = frozenset


_ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")
_WORD_RE = re.compile(r"-?\d+(\.\d+)?|[A-Za-z_][A-Za-z0-9_]*")


def _format_term(term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, str):
        return term if _ATOM_RE.fullmatch(term) else f'"{term}"'
    return repr(term)


def fact_sort_key(literal: Literal):
    return (literal.predicate, len(literal.args), tuple(map(_format_term, literal.args)))


@dataclass(frozen=True)
class Rule:
    id: str
    body: tuple[Literal, ...]
    head: tuple[Literal, ...]

    def __post_init__(self):
        if not self.body or not self.head:
            raise ConfigError(f"rule {self.id} must have a non-empty body and head")
        bound = set()
        for lit in self.body:
            bound |= lit.variables()
        for lit in self.head:
            for name in sorted(lit.variables() - bound):
                raise SafetyError(
                    f"rule {self.id}: head variable {name} does not appear in the body"
                )


class RuleBase:
    def __init__(self, rules: tuple[Rule, ...] = ()):
        self.rules = tuple(rules)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


# ---------------------------------------------------------------------------
# Tokenizer / parser


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    line: int
    column: int


def _lex(text: str):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if text.startswith("=>", i):
            tokens.append(_Token("ARROW", "=>", line, col))
            i += 2
            col += 2
            continue
        if ch in "(),.&":
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch == '"':
            j = text.find('"', i + 1)
            if j < 0 or "\n" in text[i:j]:
                raise RuleParseError("unterminated quoted literal", line, col)
            tokens.append(_Token("STRING", text[i + 1:j], line, col))
            col += j - i + 1
            i = j + 1
            continue
        match = _WORD_RE.match(text, i)
        if not match:
            raise RuleParseError(f"unexpected character {ch!r}", line, col)
        word = match.group(0)
        if word[0].isdigit() or word[0] == "-":
            kind = "NUMBER"
        elif word[0].isupper() or word[0] == "_":
            kind = "VAR"
        else:
            kind = "ATOM"
        tokens.append(_Token(kind, word, line, col))
        i += len(word)
        col += len(word)
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, kind):
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            raise RuleParseError(
                f"expected {kind}, found end of input",
                last.line if last else 1,
                last.column if last else 1,
            )
        if tok.kind != kind:
            raise RuleParseError(f"expected {kind}, found {tok.value!r}", tok.line, tok.column)
        self.pos += 1
        return tok

    def parse_term(self):
        tok = self.peek()
        if tok is None:
            raise RuleParseError("expected a term, found end of input")
        if tok.kind == "ATOM":
            self.pos += 1
            return tok.value
        if tok.kind == "VAR":
            self.pos += 1
            return Var(tok.value)
        if tok.kind == "NUMBER":
            self.pos += 1
            return float(tok.value) if "." in tok.value else int(tok.value)
        if tok.kind == "STRING":
            self.pos += 1
            return tok.value
        raise RuleParseError(f"expected a term, found {tok.value!r}", tok.line, tok.column)

    def parse_literal(self) -> Literal:
        name = self.take("ATOM")
        self.take("(")
        args = [self.parse_term()]
        while self.peek() and self.peek().kind == ",":
            self.take(",")
            args.append(self.parse_term())
        self.take(")")
        return Literal(name.value, tuple(args))


def parse_rules(text: str) -> RuleBase:
    """Parse a rulebase; raises RuleParseError / SafetyError with locations."""
    parser = _Parser(_lex(text))
    rules = []
    while parser.peek() is not None:
        body = [parser.parse_literal()]
        while parser.peek() and parser.peek().kind == "&":
            parser.take("&")
            body.append(parser.parse_literal())
        parser.take("ARROW")
        head = [parser.parse_literal()]
        while parser.peek() and parser.peek().kind == ",":
            parser.take(",")
            head.append(parser.parse_literal())
        parser.take(".")
        rules.append(Rule(f"r{len(rules) + 1}", tuple(body), tuple(head)))
    return RuleBase(tuple(rules))


def parse_fact_text(text: str) -> frozenset:
    """Parse a fact file: one ground literal per line, '.'-terminated."""
    parser = _Parser(_lex(text))
    facts = set()
    while parser.peek() is not None:
        lit = parser.parse_literal()
        parser.take(".")
        if not lit.is_ground:
            raise RuleParseError(f"fact {lit!r} contains variables")
        facts.add(lit)
    return frozenset(facts)


def load_rules(path) -> RuleBase:
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read())


def load_facts(path) -> frozenset:
    with open(path, encoding="utf-8") as fh:
        return parse_fact_text(fh.read())


# ---------------------------------------------------------------------------
# Matching and forward chaining


def unify(pattern: Literal, ground: Literal, bindings: dict) -> dict | None:
    """Match a (possibly variable-carrying) literal against a ground fact.

    Returns extended bindings on success, None on failure; the input
    bindings dict is never mutated.
    """
    if pattern.predicate != ground.predicate or len(pattern.args) != len(ground.args):
        return None
    result = dict(bindings)
    for pat_arg, fact_arg in zip(pattern.args, ground.args):
        if isinstance(pat_arg, Var):
            bound = result.get(pat_arg.name, _UNBOUND)
            if bound is _UNBOUND:
                result[pat_arg.name] = fact_arg
            elif bound != fact_arg:
                return None
        elif pat_arg != fact_arg:
            return None
    return result


_UNBOUND = object()


def substitute(literal: Literal, bindings: dict) -> Literal:
    args = tuple(bindings[a.name] if isinstance(a, Var) else a for a in literal.args)
    return Literal(literal.predicate, args)


@dataclass(frozen=True)
class TraceEntry:
    rule_id: str
    binding: dict
    produced: tuple[Literal, ...]


@dataclass(frozen=True)
class InferenceResult:
    derived: frozenset
    trace: tuple[TraceEntry, ...]

    @property
    def fired_rule_ids(self) -> tuple[str, ...]:
        seen = []
        for entry in self.trace:
            if entry.rule_id not in seen:
                seen.append(entry.rule_id)
        return tuple(seen)


@dataclass(frozen=True)
class Limits:
    max_facts: int = 100_000
    max_iterations: int = 1_000


def _match_body(body, index, bindings, pos=0):
    """Yield all bindings that satisfy the conjunction left to right."""
    if pos == len(body):
        yield bindings
        return
    literal = body[pos]
    for candidate in index.get(literal.predicate, ()):
        extended = unify(literal, candidate, bindings)
        if extended is not None:
            yield from _match_body(body, index, extended, pos + 1)


def forward_chain(rules: RuleBase, facts, limits: Limits = Limits()) -> InferenceResult:
    """Least fixpoint of the rulebase over the facts (naive bottom-up).

    Facts are iterated in sorted order so the trace is deterministic.
    Raises ResourceLimitError carrying the partial result when limits
    are exceeded.
    """
    derived = set(facts)
    trace: list[TraceEntry] = []

    def partial():
        return InferenceResult(frozenset(derived), tuple(trace))

    for _ in range(limits.max_iterations):
        index: dict[str, list[Literal]] = {}
        for f in sorted(derived, key=fact_sort_key):
            index.setdefault(f.predicate, []).append(f)
        added_this_round: set[Literal] = set()
        for rule in rules:
            for binding in _match_body(rule.body, index, {}):
                produced = []
                for head_lit in rule.head:
                    new_fact = substitute(head_lit, binding)
                    if new_fact not in derived and new_fact not in added_this_round:
                        produced.append(new_fact)
                        added_this_round.add(new_fact)
                if produced:
                    trace.append(TraceEntry(rule.id, dict(binding), tuple(produced)))
                    if len(derived) + len(added_this_round) > limits.max_facts:
                        derived |= added_this_round
                        raise ResourceLimitError(
                            f"fact limit {limits.max_facts} exceeded", partial()
                        )
        if not added_this_round:
            return partial()
        derived |= added_this_round
    raise ResourceLimitError(f"iteration limit {limits.max_iterations} exceeded", partial())


# ---------------------------------------------------------------------------
# Dialog directives projected from the closure

RESERVED_ARITIES = {
    "skipstate": 1,
    "askstate": 1,
    "slot_fill": 2,
    "recommend_constraint": 2,
    "knows_agent": 1,
}


@dataclass(frozen=True)
class DirectiveSet:
    skip: frozenset = frozenset()
    ask: frozenset = frozenset()
    slot_fills: tuple = ()
    constraints: tuple = ()
    knows: frozenset = frozenset()

    @property
    def empty(self) -> bool:
        return not (self.skip or self.ask or self.slot_fills or self.constraints or self.knows)


def derive_directives(result: InferenceResult) -> DirectiveSet:
    """Project the reserved predicates out of the derived facts."""
    skip, ask, knows = set(), set(), set()
    slot_fills, constraints = [], []
    for f in sorted(result.derived, key=fact_sort_key):
        expected = RESERVED_ARITIES.get(f.predicate)
        if expected is None:
            continue
        if len(f.args) != expected:
            raise ConfigError(
                f"reserved predicate {f.predicate} expects arity {expected}, got {f!r}"
            )
        if f.predicate == "skipstate":
            skip.add(str(f.args[0]))
        elif f.predicate == "askstate":
            ask.add(str(f.args[0]))
        elif f.predicate == "slot_fill":
            slot_fills.append((str(f.args[0]), f.args[1]))
        elif f.predicate == "recommend_constraint":
            constraints.append((str(f.args[0]), f.args[1]))
        else:
            knows.add(str(f.args[0]))
    return DirectiveSet(
        frozenset(skip), frozenset(ask), tuple(slot_fills), tuple(constraints), frozenset(knows)
    )
