"""
Probabilistic well-formedness checks.

Validation never raises: every problem becomes one entry of a
ValidationReport, and checking is free of side effects so repeated calls
give identical reports.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Union

from .acceptor import AlphabetKind, HeadAcceptor
from .costs import TOLERANCE
from .models import ConstrainedTransducerModel, RelationalAcceptorModel, STOP, TransductionModel, WordAcceptor
from .symbols import EPSILON, Vocabulary
from .transducer import HeadTransducer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Violation:
    location: str
    rule: str
    measured: Union[float, str, None]


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, location: str, rule: str, measured=None) -> None:
        self.violations.append(Violation(location, rule, measured))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"location": v.location, "rule": v.rule, "measured": v.measured}
                for v in self.violations
            ],
        }


def _check_distribution(report: ValidationReport, location: str, values: Iterable[float], tolerance: float) -> None:
    values = list(values)
    total = sum(values)
    if abs(total - 1.0) > tolerance:
        report.add(location, "normalization", total)
    for p in values:
        if not p > 0.0:
            report.add(location, "non-positive-probability", p)


def validate_acceptor(a: HeadAcceptor, alphabet: Optional[Iterable[str]] = None,
                      tolerance: float = TOLERANCE) -> ValidationReport:
    report = ValidationReport()
    symbols = set(alphabet) if alphabet is not None else None
    if a.state_count < 1:
        report.add(f"automaton {a.id}", "state-count", a.state_count)
        return report
    if not 0 <= a.default_initial < a.state_count:
        report.add(f"automaton {a.id}", "dangling-state", a.default_initial)
    for q, actions in enumerate(a.states):
        where = f"automaton {a.id} state {q}"
        _check_distribution(report, where, (action.probability for action in actions), tolerance)
        for index, action in enumerate(actions):
            at = f"{where} action {index}"
            if action.is_stop:
                if action.symbol is not None or action.next_state is not None:
                    report.add(at, "structure", "stop with symbol or next state")
                continue
            if action.symbol is None or action.next_state is None:
                report.add(at, "structure", "transition without symbol or next state")
                continue
            if not 0 <= action.next_state < a.state_count:
                report.add(at, "dangling-state", action.next_state)
            if symbols is not None and action.symbol not in symbols:
                report.add(at, "alphabet", action.symbol)
    return report


def validate_transducer(t: HeadTransducer, source_vocab: Optional[Vocabulary] = None,
                        target_vocab: Optional[Vocabulary] = None,
                        tolerance: float = TOLERANCE) -> ValidationReport:
    report = ValidationReport()
    if t.state_count < 1:
        report.add(f"transducer {t.id}", "state-count", t.state_count)
        return report
    if not 0 <= t.initial_state < t.state_count:
        report.add(f"transducer {t.id}", "dangling-state", t.initial_state)
    for q, actions in enumerate(t.states):
        where = f"transducer {t.id} state {q}"
        _check_distribution(report, where, (action.probability for action in actions), tolerance)
        for index, action in enumerate(actions):
            if action.is_stop:
                continue
            at = f"{where} action {index}"
            if action.next_state is None or not 0 <= action.next_state < t.state_count:
                report.add(at, "dangling-state", action.next_state)
            if action.epsilon_source and action.epsilon_target:
                report.add(at, "epsilon-transition", f"{EPSILON}:{EPSILON}")
            if source_vocab is not None and action.source_symbol != EPSILON and action.source_symbol not in source_vocab:
                report.add(at, "alphabet", action.source_symbol)
            if target_vocab is not None and action.target_symbol != EPSILON and action.target_symbol not in target_vocab:
                report.add(at, "alphabet", action.target_symbol)
    return report


def _in_vocab(vocab: Vocabulary, symbol: str) -> bool:
    return symbol == EPSILON or symbol in vocab


def _validate_relational(model: RelationalAcceptorModel, tolerance: float) -> ValidationReport:
    report = ValidationReport()
    vocab, relations = model.vocabulary, model.relations
    for automaton in model.automata.values():
        if automaton.alphabet_kind is not AlphabetKind.RELATION:
            report.add(f"automaton {automaton.id}", "alphabet-kind", automaton.alphabet_kind.value)
        report.extend(validate_acceptor(automaton, relations, tolerance))

    def start_exists(automaton: str, state: int) -> bool:
        return automaton in model.automata and 0 <= state < model.automata[automaton].state_count

    for (word, relation), row in model.dependency_params.items():
        where = f"dependency_params[{word}, {relation}]"
        if word not in vocab:
            report.add(where, "dangling-reference", word)
        if relation not in relations:
            report.add(where, "dangling-reference", relation)
        for dependent in row:
            if dependent not in vocab:
                report.add(where, "dangling-reference", dependent)
        _check_distribution(report, where, row.values(), tolerance)

    for (relation, word), row in model.lexicon_params.items():
        where = f"lexicon_params[{relation}, {word}]"
        if relation not in relations:
            report.add(where, "dangling-reference", relation)
        if word not in vocab:
            report.add(where, "dangling-reference", word)
        for automaton, state in row:
            if not start_exists(automaton, state):
                report.add(where, "dangling-reference", f"{automaton}:{state}")
        _check_distribution(report, where, row.values(), tolerance)

    _check_distribution(report, "top_params", model.top_params.values(), tolerance)
    for word, automaton, state in model.top_params:
        if word not in vocab:
            report.add("top_params", "dangling-reference", word)
        if not start_exists(automaton, state):
            report.add("top_params", "dangling-reference", f"{automaton}:{state}")

    # Coverage: every relation a word's automata can emit needs a dependency
    # row, and every dependent a row can choose needs a lexicon row.
    starts = {}
    for (relation, word), row in model.lexicon_params.items():
        for start in row:
            starts.setdefault(word, []).append(start)
    for word, automaton, state in model.top_params:
        starts.setdefault(word, []).append((automaton, state))
    missing = []
    for word, word_starts in starts.items():
        for automaton, state in word_starts:
            if not start_exists(automaton, state):
                continue
            for relation in model.automata[automaton].emitted_symbols(state):
                key = (word, relation)
                if key not in model.dependency_params and key not in missing:
                    missing.append(key)
    for word, relation in missing:
        report.add(f"dependency_params[{word}, {relation}]", "coverage", "missing row")
    for (word, relation), row in model.dependency_params.items():
        for dependent, p in row.items():
            if p > 0.0 and (relation, dependent) not in model.lexicon_params:
                report.add(f"lexicon_params[{relation}, {dependent}]", "coverage", "missing row")
    return report


def _validate_transduction(model: TransductionModel, tolerance: float) -> ValidationReport:
    report = ValidationReport()
    for transducer in model.transducers.values():
        report.extend(validate_transducer(transducer, model.source_vocab, model.target_vocab, tolerance))
    for (w, v), row in model.bilingual_lexicon.items():
        where = f"bilingual_lexicon[{w}, {v}]"
        if not _in_vocab(model.source_vocab, w):
            report.add(where, "dangling-reference", w)
        if not _in_vocab(model.target_vocab, v):
            report.add(where, "dangling-reference", v)
        for transducer_id in row:
            if transducer_id not in model.transducers:
                report.add(where, "dangling-reference", transducer_id)
        _check_distribution(report, where, row.values(), tolerance)
    _check_distribution(report, "top_params", model.top_params.values(), tolerance)
    for pair in model.top_params:
        if not _in_vocab(model.source_vocab, pair[0]) or not _in_vocab(model.target_vocab, pair[1]):
            report.add("top_params", "dangling-reference", f"{pair[0]}:{pair[1]}")
        elif pair not in model.bilingual_lexicon:
            report.add(f"bilingual_lexicon[{pair[0]}, {pair[1]}]", "coverage", "missing row")
    missing = []
    for transducer in model.transducers.values():
        for _, _, action in transducer.transitions():
            pair = (action.source_symbol, action.target_symbol)
            if action.epsilon_source and action.epsilon_target:
                continue
            if pair not in model.bilingual_lexicon and pair not in missing:
                missing.append(pair)
    for w, v in missing:
        report.add(f"bilingual_lexicon[{w}, {v}]", "coverage", "missing row")
    return report


def _validate_constrained(model: ConstrainedTransducerModel, tolerance: float) -> ValidationReport:
    report = ValidationReport()
    admissible = set()
    for w, v in model.dictionary:
        where = f"dictionary[{w}, {v}]"
        if (w, v) in admissible:
            report.add(where, "duplicate", f"{w}:{v}")
        admissible.add((w, v))
        if not _in_vocab(model.source_vocab, w) or not _in_vocab(model.target_vocab, v):
            report.add(where, "dangling-reference", f"{w}:{v}")
        if w == EPSILON and v == EPSILON:
            report.add(where, "epsilon-transition", f"{w}:{v}")
    uncovered = []
    for pair, row in model.params.items():
        where = f"params[{pair[0]}, {pair[1]}]"
        if pair not in admissible:
            report.add(where, "dictionary", f"{pair[0]}:{pair[1]}")
        for event in row:
            if event == STOP:
                continue
            if event.source == EPSILON and event.target == EPSILON:
                report.add(where, "epsilon-transition", f"{event.source}:{event.target}")
            elif (event.source, event.target) not in admissible:
                report.add(where, "dictionary", f"{event.source}:{event.target}")
            elif (event.source, event.target) not in model.params and (event.source, event.target) not in uncovered:
                uncovered.append((event.source, event.target))
        _check_distribution(report, where, row.values(), tolerance)
    for w, v in uncovered:
        report.add(f"params[{w}, {v}]", "coverage", "missing row")
    _check_distribution(report, "top_params", model.top_params.values(), tolerance)
    for pair in model.top_params:
        if pair not in admissible:
            report.add("top_params", "dictionary", f"{pair[0]}:{pair[1]}")
        elif pair not in model.params:
            report.add(f"params[{pair[0]}, {pair[1]}]", "coverage", "missing row")
    return report


def validate_model(model, tolerance: float = TOLERANCE) -> ValidationReport:
    if isinstance(model, RelationalAcceptorModel):
        report = _validate_relational(model, tolerance)
    elif isinstance(model, TransductionModel):
        report = _validate_transduction(model, tolerance)
    elif isinstance(model, ConstrainedTransducerModel):
        report = _validate_constrained(model, tolerance)
    elif isinstance(model, WordAcceptor):
        report = validate_acceptor(model.acceptor, model.vocabulary.words(), tolerance)
        if model.acceptor.alphabet_kind is not AlphabetKind.WORD:
            report.add(f"automaton {model.acceptor.id}", "alphabet-kind", model.acceptor.alphabet_kind.value)
    elif isinstance(model, HeadAcceptor):
        report = validate_acceptor(model, tolerance=tolerance)
    else:
        raise TypeError(f"cannot validate {type(model).__name__}")
    logger.debug("validated %s: %d violations", type(model).__name__, len(report.violations))
    return report
