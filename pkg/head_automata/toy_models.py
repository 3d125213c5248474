"""
Small hand-built and randomized models.

The hand-built models are mirrored as JSON under fixtures/; the random
builders feed the oracle tests.
"""

import itertools
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from .acceptor import AcceptorAction, AlphabetKind, HeadAcceptor
from .models import RelationalAcceptorModel, TransductionModel, WordAcceptor, simple_acceptor_model
from .symbols import EPSILON, RelationSet, Vocabulary
from .transducer import HeadTransducer, TransducerAction, Valency

L, R = Valency.LEFT, Valency.RIGHT


def anbn_acceptor() -> WordAcceptor:
    """Two states; the language is { a^n b^n : n >= 0 }."""
    acceptor = HeadAcceptor.build("anbn", [
        [AcceptorAction.stop(0.5), AcceptorAction.left("a", 1, 0.5)],
        [AcceptorAction.right("b", 0, 1.0)],
    ], alphabet_kind=AlphabetKind.WORD)
    return WordAcceptor(Vocabulary(("a", "b")), acceptor)


def palindrome_acceptor(symbols: Sequence[str] = ("a", "b")) -> WordAcceptor:
    """k + 1 states accepting the even-length palindromes over ``symbols``."""
    share = 1.0 / (len(symbols) + 1)
    states = [[AcceptorAction.stop(share)] + [AcceptorAction.left(s, i + 1, share) for i, s in enumerate(symbols)]]
    for s in symbols:
        states.append([AcceptorAction.right(s, 0, 1.0)])
    acceptor = HeadAcceptor.build("palindrome", states, alphabet_kind=AlphabetKind.WORD)
    return WordAcceptor(Vocabulary(tuple(symbols)), acceptor)


def left_only_acceptor(symbols: Sequence[str], delta: Mapping[Tuple[int, str], int], accepting: Sequence[int],
                       state_count: int, start: int = 0) -> HeadAcceptor:
    """
    The head acceptor of a complete DFA: one left transition per DFA edge
    and a stop action in every accepting state, uniform per state.
    """
    states = []
    for q in range(state_count):
        actions: List[Tuple[str, object]] = [("stop", None)] if q in accepting else []
        actions.extend(("left", s) for s in symbols)
        share = 1.0 / len(actions)
        row = []
        for kind, symbol in actions:
            if kind == "stop":
                row.append(AcceptorAction.stop(share))
            else:
                row.append(AcceptorAction.left(symbol, delta[(q, symbol)], share))
        states.append(row)
    return HeadAcceptor.build("dfa", states, alphabet_kind=AlphabetKind.WORD, default_initial=start)


def ambiguous_parser_model() -> RelationalAcceptorModel:
    """
    "a b c" has exactly two derivations: b heading a (subj) and c (obj) with
    probability 0.06, and a heading c and b as two objects with 0.04.
    """
    automata = {
        "head_b": HeadAcceptor.build("head_b", [
            [AcceptorAction.left("subj", 1, 1.0)],
            [AcceptorAction.right("obj", 2, 1.0)],
            [AcceptorAction.stop(1.0)],
        ]),
        "head_a": HeadAcceptor.build("head_a", [
            [AcceptorAction.right("obj", 1, 1.0)],
            [AcceptorAction.right("obj", 2, 1.0)],
            [AcceptorAction.stop(1.0)],
        ]),
        "leaf": HeadAcceptor.build("leaf", [[AcceptorAction.stop(1.0)]]),
    }
    dependency = {
        ("b", "subj"): {"a": 1.0},
        ("b", "obj"): {"c": 1.0},
        ("a", "obj"): {"c": 0.5, "b": 0.5},
    }
    lexicon = {
        ("subj", "a"): {("leaf", 0): 1.0},
        ("obj", "c"): {("leaf", 0): 1.0},
        ("obj", "b"): {("leaf", 0): 1.0},
    }
    top = {("b", "head_b", 0): 0.06, ("a", "head_a", 0): 0.16, ("c", "leaf", 0): 0.78}
    return RelationalAcceptorModel(Vocabulary(("a", "b", "c")), RelationSet(("subj", "obj")), automata,
                                   dependency, lexicon, top)


def cfg_cascade() -> RelationalAcceptorModel:
    """
    Word-alphabet cascade for S -> a S b S | c.

    S is headed by b or c; b takes a and the head of the first S on its left
    and the head of the second S on its right.
    """
    s_b = HeadAcceptor.build("s_b", [
        [AcceptorAction.left("a", 1, 1.0)],
        [AcceptorAction.left("b", 2, 0.3), AcceptorAction.left("c", 2, 0.7)],
        [AcceptorAction.right("b", 3, 0.3), AcceptorAction.right("c", 3, 0.7)],
        [AcceptorAction.stop(1.0)],
    ], alphabet_kind=AlphabetKind.WORD)
    s_a = HeadAcceptor.build("s_a", [[AcceptorAction.stop(1.0)]], alphabet_kind=AlphabetKind.WORD)
    s_c = HeadAcceptor.build("s_c", [[AcceptorAction.stop(1.0)]], alphabet_kind=AlphabetKind.WORD)
    return simple_acceptor_model(Vocabulary(("a", "b", "c")), {"a": s_a, "b": s_b, "c": s_c},
                                 {"b": 0.5, "c": 0.5})


def _single_word_model(automaton: HeadAcceptor, relation: str) -> RelationalAcceptorModel:
    return RelationalAcceptorModel(
        Vocabulary(("a",)), RelationSet((relation,)), {automaton.id: automaton},
        {("a", relation): {"a": 1.0}}, {(relation, "a"): {(automaton.id, 0): 1.0}},
        {("a", automaton.id, 0): 1.0})


def self_loop_model(stop: float = 0.5) -> RelationalAcceptorModel:
    """One word whose automaton keeps adding left dependents of itself."""
    loop = HeadAcceptor.build("loop", [[AcceptorAction.stop(stop), AcceptorAction.left("r", 0, 1.0 - stop)]])
    return _single_word_model(loop, "r")


def chain_model() -> RelationalAcceptorModel:
    """Every string a^n is derivable in many ways; used to watch chart growth."""
    chain = HeadAcceptor.build("chain", [
        [AcceptorAction.left("x", 0, 0.3), AcceptorAction.right("x", 1, 0.3), AcceptorAction.stop(0.4)],
        [AcceptorAction.right("x", 1, 0.5), AcceptorAction.stop(0.5)],
    ])
    return _single_word_model(chain, "x")


CALIBRATION_WORDS = {"a": 0.5, "b": 0.3, "c": 0.2}


def calibration_model() -> RelationalAcceptorModel:
    """Three words, at most one left and one right dependent per node."""
    node = HeadAcceptor.build("node", [
        [AcceptorAction.stop(0.4), AcceptorAction.left("d", 1, 0.3), AcceptorAction.right("d", 2, 0.3)],
        [AcceptorAction.stop(0.5), AcceptorAction.right("d", 2, 0.5)],
        [AcceptorAction.stop(1.0)],
    ])
    words = tuple(CALIBRATION_WORDS)
    return RelationalAcceptorModel(
        Vocabulary(words), RelationSet(("d",)), {"node": node},
        {(w, "d"): dict(CALIBRATION_WORDS) for w in words},
        {("d", w): {("node", 0): 1.0} for w in words},
        {(w, "node", 0): p for w, p in CALIBRATION_WORDS.items()})


# Transduction models


def _vocab(words) -> Vocabulary:
    words = list(dict.fromkeys(words))
    return Vocabulary.from_symbols(words, with_epsilon=EPSILON in words)


def yes_translator() -> TransductionModel:
    stop = HeadTransducer.build("stop", [[TransducerAction.stop(1.0)]])
    return TransductionModel(_vocab(["yes"]), _vocab(["oui"]), {"stop": stop},
                             {("yes", "oui"): {"stop": 1.0}}, {("yes", "oui"): 1.0})


def identity_translator(words: Sequence[str] = ("a", "b", "c")) -> TransductionModel:
    """Copies every sentence: each head reads and writes its dependents with (left, left)."""
    share = 1.0 / (len(words) + 1)
    actions = [TransducerAction.transition(w, w, L, L, 0, share) for w in words]
    actions.append(TransducerAction.stop(share))
    copy = HeadTransducer.build("copy", [actions])
    return TransductionModel(_vocab(words), _vocab(words), {"copy": copy},
                             {(w, w): {"copy": 1.0} for w in words},
                             {(w, w): 1.0 / len(words) for w in words})


def reordering_translator() -> TransductionModel:
    """
    Subject-verb-object to subject-object-verb: the object read on the
    right of "likes" is written on the left of "aime".
    """
    likes = HeadTransducer.build("likes_aime", [
        [TransducerAction.transition("john", "jean", L, L, 1, 0.6),
         TransducerAction.transition("mary", "marie", L, L, 1, 0.4)],
        [TransducerAction.transition("mary", "marie", R, L, 2, 0.7),
         TransducerAction.transition("john", "jean", R, L, 2, 0.3)],
        [TransducerAction.stop(1.0)],
    ])
    leaf = HeadTransducer.build("leaf", [[TransducerAction.stop(1.0)]])
    lexicon = {
        ("likes", "aime"): {"likes_aime": 1.0},
        ("john", "jean"): {"leaf": 1.0},
        ("mary", "marie"): {"leaf": 1.0},
    }
    top = {("likes", "aime"): 0.8, ("john", "jean"): 0.1, ("mary", "marie"): 0.1}
    return TransductionModel(_vocab(["john", "likes", "mary"]), _vocab(["jean", "aime", "marie"]),
                             {"likes_aime": likes, "leaf": leaf}, lexicon, top)


def separation_witness() -> TransductionModel:
    """
    Two states move the word read next to the head to the far end of the
    target: "y h x^n" translates to "h x^n y".
    """
    carry = HeadTransducer.build("carry", [
        [TransducerAction.transition("y", "y", L, R, 1, 1.0)],
        [TransducerAction.transition("x", "x", R, R, 1, 0.5), TransducerAction.stop(0.5)],
    ])
    leaf = HeadTransducer.build("leaf", [[TransducerAction.stop(1.0)]])
    words = ["h", "x", "y"]
    return TransductionModel(_vocab(words), _vocab(words), {"carry": carry, "leaf": leaf},
                             {("h", "h"): {"carry": 1.0}, ("x", "x"): {"leaf": 1.0}, ("y", "y"): {"leaf": 1.0}},
                             {("h", "h"): 1.0})


# Sequential transducer over {a, b}: (state, input) -> (output, next state, probability)
SEQUENTIAL_EDGES: Dict[Tuple[int, str], Tuple[str, int, float]] = {
    (0, "a"): ("x", 1, 0.4),
    (0, "b"): ("y", 0, 0.4),
    (1, "a"): ("y", 0, 0.3),
    (1, "b"): ("x", 1, 0.3),
}
SEQUENTIAL_STOP = {0: 0.2, 1: 0.4}
END_MARKER = "#"


def sequential_translator() -> TransductionModel:
    """
    SEQUENTIAL_EDGES as a head transducer that only uses (left, left).

    Sentences end in END_MARKER, whose transducer reads every other word
    from left to right.
    """
    states: List[List[TransducerAction]] = [[], []]
    for (q, symbol), (output, nxt, p) in SEQUENTIAL_EDGES.items():
        states[q].append(TransducerAction.transition(symbol, output, L, L, nxt, p))
    for q, p in SEQUENTIAL_STOP.items():
        states[q].append(TransducerAction.stop(p))
    fst = HeadTransducer.build("fst", states)
    leaf = HeadTransducer.build("leaf", [[TransducerAction.stop(1.0)]])
    lexicon = {(END_MARKER, END_MARKER): {"fst": 1.0}}
    for _, symbol in SEQUENTIAL_EDGES:
        for output, _, _ in SEQUENTIAL_EDGES.values():
            lexicon.setdefault((symbol, output), {"leaf": 1.0})
    return TransductionModel(_vocab(["a", "b", END_MARKER]), _vocab(["x", "y", END_MARKER]),
                             {"fst": fst, "leaf": leaf}, lexicon, {(END_MARKER, END_MARKER): 1.0})


# Randomized models


def _weights(rng: np.random.Generator, n: int) -> List[float]:
    raw = 0.2 + rng.random(n)
    return list(raw / raw.sum())


def _subset(rng: np.random.Generator, items: Sequence, at_most: int) -> List:
    size = int(rng.integers(1, min(at_most, len(items)) + 1))
    chosen = sorted(rng.choice(len(items), size=size, replace=False))
    return [items[i] for i in chosen]


def random_acceptor_model(rng: np.random.Generator, vocab_size: int = 3, relation_count: int = 2,
                          automaton_count: int = 2, max_states: int = 2) -> RelationalAcceptorModel:
    words = tuple(f"w{i}" for i in range(vocab_size))
    relations = tuple(f"r{i}" for i in range(relation_count))
    automata: Dict[str, HeadAcceptor] = {}
    for m in range(automaton_count):
        state_count = int(rng.integers(1, max_states + 1))
        states = []
        for _ in range(state_count):
            transitions = int(rng.integers(0, 3))
            probs = _weights(rng, transitions + 1)
            row = [AcceptorAction.stop(probs[0])]
            for p in probs[1:]:
                symbol = relations[int(rng.integers(relation_count))]
                nxt = int(rng.integers(state_count))
                row.append(AcceptorAction.left(symbol, nxt, p) if rng.random() < 0.5
                           else AcceptorAction.right(symbol, nxt, p))
            states.append(row)
        automata[f"m{m}"] = HeadAcceptor.build(f"m{m}", states)
    starts = [(a.id, q) for a in automata.values() for q in range(a.state_count)]

    dependency = {}
    for w, r in itertools.product(words, relations):
        chosen = _subset(rng, words, 2)
        dependency[(w, r)] = dict(zip(chosen, _weights(rng, len(chosen))))
    lexicon = {}
    for r, w in itertools.product(relations, words):
        chosen = _subset(rng, starts, 2)
        lexicon[(r, w)] = dict(zip(chosen, _weights(rng, len(chosen))))
    roots = _subset(rng, [(w, m, 0) for w in words for m in automata], 4)
    top = dict(zip(roots, _weights(rng, len(roots))))
    return RelationalAcceptorModel(Vocabulary(words), RelationSet(relations), automata, dependency, lexicon, top)


def random_transduction_model(rng: np.random.Generator, source_words: Sequence[str] = ("a", "b"),
                              target_words: Sequence[str] = ("x", "y"), pair_count: int = 4,
                              epsilon: bool = False, max_states: int = 2) -> TransductionModel:
    """
    A model over at most ``pair_count`` dictionary pairs, each with its own
    transducer. With ``epsilon`` the candidate pairs include insertions
    (ε, v) and deletions (w, ε).
    """
    candidates = [(w, v) for w in source_words for v in target_words]
    if epsilon:
        candidates += [(EPSILON, v) for v in target_words] + [(w, EPSILON) for w in source_words]
    dictionary = _subset(rng, candidates, pair_count)
    if all(w == EPSILON for w, _ in dictionary):
        dictionary.append((source_words[0], target_words[0]))
    transducers: Dict[str, HeadTransducer] = {}
    lexicon = {}
    for n, (w, v) in enumerate(dictionary):
        transducer_id = f"t{n}"
        state_count = 1 if w == EPSILON else int(rng.integers(1, max_states + 1))
        states = []
        for _ in range(state_count):
            moves = [] if w == EPSILON else _subset(rng, dictionary, 3)
            probs = _weights(rng, len(moves) + 1)
            row = [TransducerAction.stop(probs[0])]
            for (dw, dv), p in zip(moves, probs[1:]):
                source_valency = L if dw == EPSILON or rng.random() < 0.5 else R
                target_valency = L if dv == EPSILON or rng.random() < 0.5 else R
                row.append(TransducerAction.transition(dw, dv, source_valency, target_valency,
                                                       int(rng.integers(state_count)), p))
            states.append(row)
        transducers[transducer_id] = HeadTransducer.build(transducer_id, states)
        lexicon[(w, v)] = {transducer_id: 1.0}
    roots = [pair for pair in dictionary if pair[0] != EPSILON]
    top = dict(zip(roots, _weights(rng, len(roots))))
    extra = [EPSILON] if epsilon else []
    return TransductionModel(_vocab(list(source_words) + extra), _vocab(list(target_words) + extra),
                             transducers, lexicon, top)
