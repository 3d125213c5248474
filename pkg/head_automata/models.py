"""
Model containers.

Three model shapes share the same conventions: probabilities are stored as
given, zero-probability entries are absent, and every mapping iterates in the
order it was built (which is the order of the model file).
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Mapping, NamedTuple, Tuple, Union

from .acceptor import AlphabetKind, HeadAcceptor
from .costs import to_cost
from .symbols import EPSILON, RelationSet, Vocabulary
from .transducer import HeadTransducer, TransducerAction, Valency

WordPair = Tuple[str, str]
Start = Tuple[str, int]


@dataclass(frozen=True)
class WordAcceptor:
    """A standalone simple head acceptor together with its word vocabulary."""

    vocabulary: Vocabulary
    acceptor: HeadAcceptor


@dataclass(frozen=True)
class RelationalAcceptorModel:
    vocabulary: Vocabulary
    relations: RelationSet
    automata: Mapping[str, HeadAcceptor]
    dependency_params: Mapping[Tuple[str, str], Mapping[str, float]]
    lexicon_params: Mapping[Tuple[str, str], Mapping[Start, float]]
    top_params: Mapping[Tuple[str, str, int], float]

    @cached_property
    def top_by_word(self) -> Dict[str, List[Tuple[Start, float]]]:
        starts: Dict[str, List[Tuple[Start, float]]] = {}
        for (word, automaton, state), p in self.top_params.items():
            starts.setdefault(word, []).append(((automaton, state), p))
        return starts

    def parameter_count(self) -> int:
        return (sum(len(row) for row in self.dependency_params.values())
                + sum(len(row) for row in self.lexicon_params.values())
                + len(self.top_params))


def simple_acceptor_model(vocabulary: Vocabulary, acceptors: Mapping[str, HeadAcceptor],
                          top: Mapping[str, float]) -> RelationalAcceptorModel:
    """
    Build a cascade of word-alphabet head acceptors as a relational model.

    Every word w is its own relation label. The acceptor for w writes
    dependent words directly, so dependency parameters are deterministic
    (the r-dependent of any head is the word r) and each dependent starts its
    own acceptor in that acceptor's default initial state.

    Args:
        vocabulary: words of the language
        acceptors: word -> word-alphabet acceptor M_w
        top: word -> P(w0 | Top)

    Returns:
        RelationalAcceptorModel generating the same ordered trees.
    """
    relations = RelationSet(vocabulary.words())
    automata: Dict[str, HeadAcceptor] = {}
    for acceptor in acceptors.values():
        automata[acceptor.id] = HeadAcceptor(acceptor.id, AlphabetKind.RELATION,
                                             acceptor.states, acceptor.default_initial)
    dependency: Dict[Tuple[str, str], Dict[str, float]] = {}
    lexicon: Dict[Tuple[str, str], Dict[Start, float]] = {}
    for word, acceptor in acceptors.items():
        for q in range(acceptor.state_count):
            for symbol in acceptor.emitted_symbols(q):
                dependency[(word, symbol)] = {symbol: 1.0}
        lexicon[(word, word)] = {(acceptor.id, acceptor.default_initial): 1.0}
    top_params = {(word, acceptors[word].id, acceptors[word].default_initial): p for word, p in top.items()}
    return RelationalAcceptorModel(vocabulary, relations, automata, dependency, lexicon, top_params)


@dataclass(frozen=True)
class TransductionModel:
    source_vocab: Vocabulary
    target_vocab: Vocabulary
    transducers: Mapping[str, HeadTransducer]
    bilingual_lexicon: Mapping[WordPair, Mapping[str, float]]
    top_params: Mapping[WordPair, float]

    @cached_property
    def has_epsilon_source(self) -> bool:
        return any(t.has_epsilon_source() for t in self.transducers.values())

    def cost_table(self) -> List[Tuple[str, tuple, float]]:
        """Every parameter as (kind, key, cost), in model order."""
        table: List[Tuple[str, tuple, float]] = []
        for pair, p in self.top_params.items():
            table.append(("top", pair, to_cost(p)))
        for pair, row in self.bilingual_lexicon.items():
            for transducer_id, p in row.items():
                table.append(("lexicon", pair + (transducer_id,), to_cost(p)))
        for transducer in self.transducers.values():
            for q, actions in enumerate(transducer.states):
                for index, action in enumerate(actions):
                    table.append(("action", (transducer.id, q, index), to_cost(action.probability)))
        return table


STOP = "stop"


class TransitionEvent(NamedTuple):
    source: str
    target: str
    source_valency: Valency
    target_valency: Valency


Event = Union[str, TransitionEvent]


class EmbeddedModel(NamedTuple):
    model: TransductionModel
    # transducer id -> (head pair, event of each action index)
    events: Dict[str, Tuple[WordPair, Tuple[Event, ...]]]


def pair_transducer_id(pair: WordPair) -> str:
    return f"{pair[0]}\t{pair[1]}"


@dataclass(frozen=True)
class ConstrainedTransducerModel:
    source_vocab: Vocabulary
    target_vocab: Vocabulary
    dictionary: Tuple[WordPair, ...]
    params: Mapping[WordPair, Mapping[Event, float]]
    top_params: Mapping[WordPair, float]

    def parameter_count(self) -> int:
        return sum(len(row) for row in self.params.values()) + len(self.top_params)

    @cached_property
    def embedding(self) -> EmbeddedModel:
        """The same model as a collection of single-state transducers, one per dictionary pair."""
        transducers: Dict[str, HeadTransducer] = {}
        lexicon: Dict[WordPair, Dict[str, float]] = {}
        events: Dict[str, Tuple[WordPair, Tuple[Event, ...]]] = {}
        for pair, row in self.params.items():
            actions = []
            action_events = []
            for event, p in row.items():
                if p <= 0.0:
                    continue
                if event == STOP:
                    actions.append(TransducerAction.stop(p))
                else:
                    actions.append(TransducerAction.transition(event.source, event.target, event.source_valency,
                                                               event.target_valency, 0, p))
                action_events.append(event)
            transducer_id = pair_transducer_id(pair)
            transducers[transducer_id] = HeadTransducer(transducer_id, (tuple(actions),), 0)
            lexicon[pair] = {transducer_id: 1.0}
            events[transducer_id] = (pair, tuple(action_events))
        model = TransductionModel(self.source_vocab, self.target_vocab, transducers, lexicon, dict(self.top_params))
        return EmbeddedModel(model, events)

    def to_transduction_model(self) -> TransductionModel:
        return self.embedding.model


def as_transduction_model(model: Union[TransductionModel, ConstrainedTransducerModel]) -> TransductionModel:
    if isinstance(model, ConstrainedTransducerModel):
        return model.to_transduction_model()
    return model


def epsilon_pair(pair: WordPair) -> bool:
    return pair[0] == EPSILON and pair[1] == EPSILON
