"""
JSON model format.

One UTF-8 JSON document per model. Every object is checked for unknown keys,
symbols keep the order they have in the file, and ``<eps>`` stands for the
empty word.
"""

import json
import logging
import os
from dataclasses import replace
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from .acceptor import AcceptorAction, ActionKind, AlphabetKind, HeadAcceptor
from .costs import round12
from .errors import ModelFormatError
from .models import (
    STOP,
    ConstrainedTransducerModel,
    RelationalAcceptorModel,
    TransductionModel,
    TransitionEvent,
    WordAcceptor,
)
from .symbols import EPSILON, RelationSet, Vocabulary
from .transducer import HeadTransducer, TransducerAction, Valency

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

AnyModel = Union[RelationalAcceptorModel, TransductionModel, ConstrainedTransducerModel, WordAcceptor]

_KIND_KEYS = {
    "acceptor_model": {"vocab", "relations", "automata", "dependency_params", "lexicon_params", "top_params"},
    "transduction_model": {"source_vocab", "target_vocab", "transducers", "bilingual_lexicon", "top_params"},
    "constrained_transducer_model": {"source_vocab", "target_vocab", "dictionary", "params", "top_params"},
    "head_acceptor": {"vocab", "automaton"},
}


class _Reader:
    """Decodes one model document, remembering where it came from for diagnostics."""

    def __init__(self, path: Optional[str], renormalize: bool):
        self.path = path
        self.renormalize = renormalize

    def fail(self, message: str, location: str) -> ModelFormatError:
        return ModelFormatError(message, path=self.path, location=location)

    def keys(self, obj: Any, location: str, required: Iterable[str], optional: Iterable[str] = ()) -> None:
        if not isinstance(obj, dict):
            raise self.fail(f"expected an object, got {type(obj).__name__}", location)
        required = set(required)
        allowed = required | set(optional)
        unknown = [k for k in obj if k not in allowed]
        if unknown:
            raise self.fail(f"unknown key(s) {', '.join(sorted(unknown))}", location)
        missing = [k for k in sorted(required) if k not in obj]
        if missing:
            raise self.fail(f"missing key(s) {', '.join(missing)}", location)

    def mapping(self, obj: Any, location: str) -> Dict[str, Any]:
        if not isinstance(obj, dict):
            raise self.fail(f"expected an object, got {type(obj).__name__}", location)
        return obj

    def strings(self, obj: Any, location: str) -> List[str]:
        if not isinstance(obj, list) or not all(isinstance(s, str) for s in obj):
            raise self.fail("expected an array of strings", location)
        return obj

    def probability(self, value: Any, location: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail(f"expected a probability, got {value!r}", location)
        return float(value)

    def integer(self, value: Any, location: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail(f"expected an integer, got {value!r}", location)
        return value

    def distribution(self, row: Dict[Any, float], location: str) -> Dict[Any, float]:
        if not self.renormalize:
            return row
        total = sum(row.values())
        if total <= 0.0 or total == 1.0:
            return row
        logger.warning("⚠️ Renormalized %s (sum was %.12g)", location, total)
        return {k: p / total for k, p in row.items()}

    def vocabulary(self, obj: Any, location: str) -> Vocabulary:
        symbols = self.strings(obj, location)
        try:
            return Vocabulary(tuple(symbols), includes_epsilon=EPSILON in symbols)
        except ModelFormatError as e:
            raise self.fail(str(e), location)

    # Machines

    def acceptor_action(self, obj: Any, location: str) -> AcceptorAction:
        if not isinstance(obj, dict) or "kind" not in obj:
            raise self.fail("action needs a kind", location)
        try:
            kind = ActionKind(obj["kind"])
        except ValueError:
            raise self.fail(f"unknown action kind {obj['kind']!r}", location)
        if kind is ActionKind.STOP:
            self.keys(obj, location, {"kind", "prob"})
            return AcceptorAction.stop(self.probability(obj["prob"], location))
        self.keys(obj, location, {"kind", "symbol", "next", "prob"})
        if not isinstance(obj["symbol"], str):
            raise self.fail("symbol must be a string", location)
        return AcceptorAction(kind, obj["symbol"], self.integer(obj["next"], location),
                              self.probability(obj["prob"], location))

    def acceptor(self, obj: Any, location: str) -> HeadAcceptor:
        self.keys(obj, location, {"id", "states"}, {"alphabet", "initial"})
        try:
            alphabet = AlphabetKind(obj.get("alphabet", AlphabetKind.RELATION.value))
        except ValueError:
            raise self.fail(f"unknown alphabet {obj.get('alphabet')!r}", location)
        states = []
        for q, actions in enumerate(self._states(obj, location)):
            parsed = [self.acceptor_action(a, f"{location}.states[{q}][{i}]") for i, a in enumerate(actions)]
            states.append(tuple(self._renormalized_actions(parsed, f"{location}.states[{q}]")))
        return HeadAcceptor(str(obj["id"]), alphabet, tuple(states), self.integer(obj.get("initial", 0), location))

    def transducer_action(self, obj: Any, location: str) -> TransducerAction:
        if not isinstance(obj, dict) or "kind" not in obj:
            raise self.fail("action needs a kind", location)
        if obj["kind"] == "stop":
            self.keys(obj, location, {"kind", "prob"})
            return TransducerAction.stop(self.probability(obj["prob"], location))
        if obj["kind"] != "transition":
            raise self.fail(f"unknown action kind {obj['kind']!r}", location)
        self.keys(obj, location, {"kind", "source", "target", "source_valency", "target_valency", "next", "prob"})
        try:
            valencies = Valency(obj["source_valency"]), Valency(obj["target_valency"])
        except ValueError:
            raise self.fail("valency must be 'left' or 'right'", location)
        if not isinstance(obj["source"], str) or not isinstance(obj["target"], str):
            raise self.fail("transition symbols must be strings", location)
        return TransducerAction.transition(obj["source"], obj["target"], valencies[0], valencies[1],
                                           self.integer(obj["next"], location),
                                           self.probability(obj["prob"], location))

    def transducer(self, obj: Any, location: str) -> HeadTransducer:
        self.keys(obj, location, {"id", "states"}, {"initial"})
        states = []
        for q, actions in enumerate(self._states(obj, location)):
            parsed = [self.transducer_action(a, f"{location}.states[{q}][{i}]") for i, a in enumerate(actions)]
            states.append(tuple(self._renormalized_actions(parsed, f"{location}.states[{q}]")))
        return HeadTransducer(str(obj["id"]), tuple(states), self.integer(obj.get("initial", 0), location))

    def _states(self, obj: Dict[str, Any], location: str) -> List[list]:
        states = obj["states"]
        if not isinstance(states, list) or not all(isinstance(s, list) for s in states):
            raise self.fail("states must be an array of action arrays", location)
        return states

    def _renormalized_actions(self, actions: list, location: str) -> list:
        if not self.renormalize:
            return actions
        scaled = self.distribution({i: a.probability for i, a in enumerate(actions)}, location)
        return [replace(a, probability=scaled[i]) for i, a in enumerate(actions)]

    def machines(self, obj: Any, location: str, parse) -> Dict[str, Any]:
        if not isinstance(obj, list):
            raise self.fail("expected an array of machines", location)
        machines: Dict[str, Any] = {}
        for i, item in enumerate(obj):
            machine = parse(item, f"{location}[{i}]")
            if machine.id in machines:
                raise self.fail(f"duplicate machine id {machine.id!r}", f"{location}[{i}]")
            machines[machine.id] = machine
        return machines

    # Documents

    def acceptor_model(self, doc: Dict[str, Any]) -> RelationalAcceptorModel:
        vocabulary = self.vocabulary(doc["vocab"], "vocab")
        try:
            relations = RelationSet(tuple(self.strings(doc["relations"], "relations")))
        except ModelFormatError as e:
            raise self.fail(str(e), "relations")
        automata = self.machines(doc["automata"], "automata", self.acceptor)

        dependency: Dict[Tuple[str, str], Dict[str, float]] = {}
        for word, by_relation in self.mapping(doc["dependency_params"], "dependency_params").items():
            for relation, row in self.mapping(by_relation, f"dependency_params.{word}").items():
                where = f"dependency_params.{word}.{relation}"
                parsed = {w: self.probability(p, where) for w, p in self.mapping(row, where).items()}
                dependency[(word, relation)] = self.distribution(parsed, where)

        lexicon: Dict[Tuple[str, str], Dict[Tuple[str, int], float]] = {}
        for relation, by_word in self.mapping(doc["lexicon_params"], "lexicon_params").items():
            for word, row in self.mapping(by_word, f"lexicon_params.{relation}").items():
                where = f"lexicon_params.{relation}.{word}"
                lexicon[(relation, word)] = self.distribution(self._starts(row, where), where)

        top: Dict[Tuple[str, str, int], float] = {}
        for word, row in self.mapping(doc["top_params"], "top_params").items():
            for (automaton, state), p in self._starts(row, f"top_params.{word}").items():
                top[(word, automaton, state)] = p
        top = self.distribution(top, "top_params")
        return RelationalAcceptorModel(vocabulary, relations, automata, dependency, lexicon, top)

    def _starts(self, row: Any, location: str) -> Dict[Tuple[str, int], float]:
        starts: Dict[Tuple[str, int], float] = {}
        for automaton, by_state in self.mapping(row, location).items():
            for state, p in self.mapping(by_state, f"{location}.{automaton}").items():
                try:
                    q = int(state)
                except ValueError:
                    raise self.fail(f"state key {state!r} is not an integer", f"{location}.{automaton}")
                starts[(automaton, q)] = self.probability(p, f"{location}.{automaton}.{state}")
        return starts

    def pair_table(self, obj: Any, location: str) -> Dict[Tuple[str, str], Any]:
        table: Dict[Tuple[str, str], Any] = {}
        for w, by_target in self.mapping(obj, location).items():
            for v, value in self.mapping(by_target, f"{location}.{w}").items():
                table[(w, v)] = value
        return table

    def transduction_model(self, doc: Dict[str, Any]) -> TransductionModel:
        source_vocab = self.vocabulary(doc["source_vocab"], "source_vocab")
        target_vocab = self.vocabulary(doc["target_vocab"], "target_vocab")
        transducers = self.machines(doc["transducers"], "transducers", self.transducer)
        lexicon = {}
        for pair, row in self.pair_table(doc["bilingual_lexicon"], "bilingual_lexicon").items():
            where = f"bilingual_lexicon.{pair[0]}.{pair[1]}"
            parsed = {m: self.probability(p, where) for m, p in self.mapping(row, where).items()}
            lexicon[pair] = self.distribution(parsed, where)
        top = {pair: self.probability(p, "top_params") for pair, p in self.pair_table(doc["top_params"], "top_params").items()}
        return TransductionModel(source_vocab, target_vocab, transducers, lexicon, self.distribution(top, "top_params"))

    def constrained_model(self, doc: Dict[str, Any]) -> ConstrainedTransducerModel:
        source_vocab = self.vocabulary(doc["source_vocab"], "source_vocab")
        target_vocab = self.vocabulary(doc["target_vocab"], "target_vocab")
        dictionary = []
        if not isinstance(doc["dictionary"], list):
            raise self.fail("expected an array of pairs", "dictionary")
        for i, pair in enumerate(doc["dictionary"]):
            if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(s, str) for s in pair)):
                raise self.fail("dictionary entries are [source, target] pairs", f"dictionary[{i}]")
            dictionary.append((pair[0], pair[1]))
        params = {}
        for pair, row in self.pair_table(doc["params"], "params").items():
            where = f"params.{pair[0]}.{pair[1]}"
            self.keys(row, where, (), {"stop", "transitions"})
            events: Dict[Any, float] = {}
            if "stop" in row:
                events[STOP] = self.probability(row["stop"], where)
            for i, entry in enumerate(row.get("transitions", [])):
                at = f"{where}.transitions[{i}]"
                if not (isinstance(entry, list) and len(entry) == 5):
                    raise self.fail("transition entries are [source, target, source_valency, target_valency, prob]", at)
                try:
                    event = TransitionEvent(str(entry[0]), str(entry[1]), Valency(entry[2]), Valency(entry[3]))
                except ValueError:
                    raise self.fail("valency must be 'left' or 'right'", at)
                events[event] = self.probability(entry[4], at)
            params[pair] = self.distribution(events, where)
        top = {pair: self.probability(p, "top_params") for pair, p in self.pair_table(doc["top_params"], "top_params").items()}
        return ConstrainedTransducerModel(source_vocab, target_vocab, tuple(dictionary), params,
                                          self.distribution(top, "top_params"))

    def word_acceptor(self, doc: Dict[str, Any]) -> WordAcceptor:
        vocabulary = self.vocabulary(doc["vocab"], "vocab")
        acceptor = self.acceptor(doc["automaton"], "automaton")
        return WordAcceptor(vocabulary, acceptor)


def model_from_json(doc: Any, path: Optional[str] = None, renormalize: bool = False) -> AnyModel:
    reader = _Reader(path, renormalize)
    if not isinstance(doc, dict):
        raise reader.fail("model document must be a JSON object", "<root>")
    if doc.get("format_version") != FORMAT_VERSION:
        raise reader.fail(f"unsupported format_version {doc.get('format_version')!r}", "format_version")
    kind = doc.get("kind")
    if kind not in _KIND_KEYS:
        raise reader.fail(f"unknown model kind {kind!r}", "kind")
    reader.keys(doc, "<root>", _KIND_KEYS[kind] | {"format_version", "kind"})
    if kind == "acceptor_model":
        return reader.acceptor_model(doc)
    if kind == "transduction_model":
        return reader.transduction_model(doc)
    if kind == "constrained_transducer_model":
        return reader.constrained_model(doc)
    return reader.word_acceptor(doc)


def load_model(path: str, renormalize: bool = False) -> AnyModel:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"invalid JSON: {e}", path=path)
    except OSError as e:
        raise ModelFormatError(f"cannot read model: {e.strerror}", path=path)
    return model_from_json(doc, path=path, renormalize=renormalize)


# Writing


def _acceptor_action_json(action: AcceptorAction) -> Dict[str, Any]:
    if action.is_stop:
        return {"kind": "stop", "prob": round12(action.probability)}
    return {"kind": action.kind.value, "symbol": action.symbol, "next": action.next_state,
            "prob": round12(action.probability)}


def _acceptor_json(acceptor: HeadAcceptor) -> Dict[str, Any]:
    return {
        "id": acceptor.id,
        "alphabet": acceptor.alphabet_kind.value,
        "initial": acceptor.default_initial,
        "states": [[_acceptor_action_json(a) for a in actions] for actions in acceptor.states],
    }


def _transducer_action_json(action: TransducerAction) -> Dict[str, Any]:
    if action.is_stop:
        return {"kind": "stop", "prob": round12(action.probability)}
    return {
        "kind": "transition",
        "source": action.source_symbol,
        "target": action.target_symbol,
        "source_valency": action.source_valency.value,
        "target_valency": action.target_valency.value,
        "next": action.next_state,
        "prob": round12(action.probability),
    }


def _nested(table: Dict[tuple, Any], convert=round12) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for (outer, inner), value in table.items():
        out.setdefault(outer, {})[inner] = convert(value)
    return out


def _starts_json(row: Dict[Tuple[str, int], float]) -> Dict[str, Dict[str, float]]:
    out: Dict[str, Dict[str, float]] = {}
    for (automaton, state), p in row.items():
        out.setdefault(automaton, {})[str(state)] = round12(p)
    return out


def model_to_json(model: AnyModel) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"format_version": FORMAT_VERSION}
    if isinstance(model, RelationalAcceptorModel):
        top: Dict[str, Dict[Tuple[str, int], float]] = {}
        for (word, automaton, state), p in model.top_params.items():
            top.setdefault(word, {})[(automaton, state)] = p
        doc.update({
            "kind": "acceptor_model",
            "vocab": list(model.vocabulary.symbols),
            "relations": list(model.relations.relations),
            "automata": [_acceptor_json(a) for a in model.automata.values()],
            "dependency_params": _nested(model.dependency_params, lambda row: {w: round12(p) for w, p in row.items()}),
            "lexicon_params": _nested(model.lexicon_params, _starts_json),
            "top_params": {word: _starts_json(row) for word, row in top.items()},
        })
    elif isinstance(model, TransductionModel):
        doc.update({
            "kind": "transduction_model",
            "source_vocab": list(model.source_vocab.symbols),
            "target_vocab": list(model.target_vocab.symbols),
            "transducers": [
                {"id": t.id, "initial": t.initial_state,
                 "states": [[_transducer_action_json(a) for a in actions] for actions in t.states]}
                for t in model.transducers.values()
            ],
            "bilingual_lexicon": _nested(model.bilingual_lexicon, lambda row: {m: round12(p) for m, p in row.items()}),
            "top_params": _nested(model.top_params),
        })
    elif isinstance(model, ConstrainedTransducerModel):
        def events_json(row):
            out: Dict[str, Any] = {}
            transitions = []
            for event, p in row.items():
                if event == STOP:
                    out["stop"] = round12(p)
                else:
                    transitions.append([event.source, event.target, event.source_valency.value,
                                        event.target_valency.value, round12(p)])
            if transitions:
                out["transitions"] = transitions
            return out

        doc.update({
            "kind": "constrained_transducer_model",
            "source_vocab": list(model.source_vocab.symbols),
            "target_vocab": list(model.target_vocab.symbols),
            "dictionary": [[w, v] for w, v in model.dictionary],
            "params": _nested(model.params, events_json),
            "top_params": _nested(model.top_params),
        })
    elif isinstance(model, WordAcceptor):
        doc.update({
            "kind": "head_acceptor",
            "vocab": list(model.vocabulary.symbols),
            "automaton": _acceptor_json(model.acceptor),
        })
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return doc


def dump_model(model: AnyModel, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_json(model), f, ensure_ascii=False, indent=2)
        f.write("\n")
    return path


def load_automata(path: str) -> Tuple[HeadAcceptor, ...]:
    """
    Read relational automaton skeletons for supervised estimation.

    Accepts a document of kind ``automata`` (just the machine list) or a
    full ``acceptor_model`` whose automata are reused.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"invalid JSON: {e}", path=path)
    except OSError as e:
        raise ModelFormatError(f"cannot read automata: {e.strerror}", path=path)
    reader = _Reader(path, renormalize=False)
    if isinstance(doc, dict) and doc.get("kind") == "automata":
        reader.keys(doc, "<root>", {"format_version", "kind", "automata"})
        if doc["format_version"] != FORMAT_VERSION:
            raise reader.fail(f"unsupported format_version {doc['format_version']!r}", "format_version")
        return tuple(reader.machines(doc["automata"], "automata", reader.acceptor).values())
    model = model_from_json(doc, path=path)
    if not isinstance(model, RelationalAcceptorModel):
        raise reader.fail("expected automata or an acceptor_model", "kind")
    return tuple(model.automata.values())
