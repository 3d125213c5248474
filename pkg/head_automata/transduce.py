"""
The transduction search engine.

One chart serves decoding (source known, target free) and pair scoring
(both sides known). A run item is

    ("run", M, src, tgt, q, k, e)

for transducer M in state q with source material src = (i, h, j) still to
read ([i, h) on the left of the head at h, [h+1, j) on its right) or None for
an ε-sourced head. tgt is the same triple over the target sentence when
scoring, ANY when decoding a head with a non-ε target, and None for heads
whose subtree writes no target words. k counts the ε-source transitions this
head has taken and e is the exact number of ε-sourced nodes still to be
generated below it, which keeps the ε budget global while items stay local.

A dependent item ("dep", w, v, src_span, tgt_span, e) chooses the
transducer of the dependent pair (w, v) and its head positions in the spans.
"""

import logging
import math
from dataclasses import dataclass
from typing import Hashable, Iterator, List, Optional, Sequence, Tuple, Union

from .costs import Cost, to_cost
from .errors import ImpossibleDerivationError, ModelFormatError
from .hypergraph import Derivation, EdgeSpec, Hypergraph
from .models import ConstrainedTransducerModel, TransductionModel, as_transduction_model
from .paired_derivation import NoTranslation, PairedDerivation, PairedNode, TransductionResult
from .symbols import EPSILON
from .transducer import Valency

logger = logging.getLogger(__name__)

ANY = "*"
GOAL = ("goal",)

AnyTransductionModel = Union[TransductionModel, ConstrainedTransducerModel]


@dataclass(frozen=True)
class EpsilonBudget:
    """Bounds on ε-sourced material: per head pair, and in total as a multiple of the source length."""

    per_head: int = 2
    total_factor: float = 2

    def __post_init__(self):
        if self.per_head < 0:
            raise ValueError(f"per_head must be non-negative, got {self.per_head}")
        if self.total_factor < 0:
            raise ValueError(f"total_factor must be non-negative, got {self.total_factor}")

    def total(self, source_length: int) -> int:
        return int(math.floor(self.total_factor * source_length))


def _exhausted(span) -> bool:
    if span is None or span == ANY:
        return True
    i, h, j = span
    return i == h and j == h + 1


def _splits(span: Tuple[int, int, int], valency: Valency) -> Iterator[Tuple[Tuple[int, int], Tuple[int, int, int]]]:
    """Outermost remaining dependent span on one side, and what remains after it."""
    i, h, j = span
    if valency is Valency.LEFT:
        for k in range(i + 1, h + 1):
            yield (i, k), (k, h, j)
    else:
        for k in range(j - 1, h, -1):
            yield (k, j), (i, h, k)


class _TransductionChart:
    def __init__(self, model: TransductionModel, source: Tuple[str, ...], target: Optional[Tuple[str, ...]],
                 budget: EpsilonBudget):
        self.model = model
        self.source = source
        self.target = target
        self.per_head = budget.per_head
        self.total = budget.total(len(source)) if model.has_epsilon_source else 0

    @property
    def decoding(self) -> bool:
        return self.target is None

    def expand(self, key: Hashable) -> Iterator[EdgeSpec]:
        kind = key[0]
        if kind == "run":
            yield from self._run(*key[1:])
        elif kind == "dep":
            yield from self._dep(*key[1:])
        else:
            yield from self._goal()

    def _heads(self, sentence: Optional[Tuple[str, ...]], word: str, span: Tuple[int, int]):
        a, b = span
        return [(a, d, b) for d in range(a, b) if sentence[d] == word]

    def _target_heads(self, word: str, span) -> List:
        if word == EPSILON:
            return [None]
        if self.decoding:
            return [ANY]
        return self._heads(self.target, word, span)

    def _goal(self) -> Iterator[EdgeSpec]:
        n = len(self.source)
        for (w, v), p_top in self.model.top_params.items():
            if w == EPSILON:
                continue
            heads = self._heads(self.source, w, (0, n))
            if not heads:
                continue
            if v == EPSILON:
                targets = [None] if self.decoding or not self.target else []
            else:
                targets = self._target_heads(v, (0, len(self.target)) if not self.decoding else None)
            for transducer_id, p_lex in self.model.bilingual_lexicon.get((w, v), {}).items():
                initial = self.model.transducers[transducer_id].initial_state
                cost = to_cost(p_top) + to_cost(p_lex)
                for src in heads:
                    for tgt in targets:
                        g = tgt[1] if isinstance(tgt, tuple) else None
                        for e in range(self.total + 1):
                            yield ([("run", transducer_id, src, tgt, initial, 0, e)], cost,
                                   ("top", w, v, transducer_id, src[1], g))

    def _side_splits(self, span, symbol: str, valency: Valency, sentence: Optional[Tuple[str, ...]]):
        if symbol == EPSILON:
            yield None, span
            return
        if span == ANY:
            yield ANY, ANY
            return
        for child, rest in _splits(span, valency):
            if symbol in sentence[child[0]:child[1]]:
                yield child, rest

    def _run(self, transducer_id: str, src, tgt, state: int, k: int, e: int) -> Iterator[EdgeSpec]:
        for index, action in enumerate(self.model.transducers[transducer_id].actions(state)):
            cost = to_cost(action.probability)
            if action.is_stop:
                if e == 0 and _exhausted(src) and _exhausted(tgt):
                    yield (), cost, ("stop", transducer_id, state, index)
                continue
            w, v = action.source_symbol, action.target_symbol
            if w == EPSILON and v == EPSILON:
                continue
            if (w != EPSILON and src is None) or (v != EPSILON and tgt is None):
                continue
            epsilon_source = w == EPSILON
            if epsilon_source and k >= self.per_head:
                continue
            next_k = k + 1 if epsilon_source else k
            for child_src, rest_src in self._side_splits(src, w, action.source_valency, self.source):
                for child_tgt, rest_tgt in self._side_splits(tgt, v, action.target_valency, self.target):
                    for ec in range(1 if epsilon_source else 0, e + 1):
                        yield ([("dep", w, v, child_src, child_tgt, ec),
                                ("run", transducer_id, rest_src, rest_tgt, action.next_state, next_k, e - ec)],
                               cost, ("act", transducer_id, state, index))

    def _dep(self, w: str, v: str, src_span, tgt_span, e: int) -> Iterator[EdgeSpec]:
        remaining = e - 1 if w == EPSILON else e
        if remaining < 0:
            return
        heads = [None] if w == EPSILON else self._heads(self.source, w, src_span)
        targets = self._target_heads(v, tgt_span)
        for transducer_id, p_lex in self.model.bilingual_lexicon.get((w, v), {}).items():
            initial = self.model.transducers[transducer_id].initial_state
            cost = to_cost(p_lex)
            for src in heads:
                for tgt in targets:
                    d = src[1] if src is not None else None
                    g = tgt[1] if isinstance(tgt, tuple) else None
                    yield ([("run", transducer_id, src, tgt, initial, 0, remaining)], cost,
                           ("dep", w, v, transducer_id, d, g))


def transduction_chart(model: AnyTransductionModel, source: Sequence[str], target: Optional[Sequence[str]] = None,
                       budget: EpsilonBudget = EpsilonBudget()) -> Hypergraph:
    """
    The derivation forest of a source sentence, or of a sentence pair when
    ``target`` is given.
    """
    model = as_transduction_model(model)
    if not model.top_params:
        raise ModelFormatError("a decodable model needs top parameters", location="top_params")
    source = tuple(source)
    if not source:
        raise ValueError("cannot transduce an empty source sequence")
    chart = _TransductionChart(model, source, tuple(target) if target is not None else None, budget)
    graph = Hypergraph.build(GOAL, chart.expand)
    logger.debug("transduction chart for %d source tokens: %d nodes, %d edges",
                 len(source), len(graph.keys), len(graph.edges))
    return graph


def derivation_from_chart(model: TransductionModel, derivation: Derivation) -> PairedDerivation:
    _, w, v, transducer_id, _, _ = derivation.label
    return PairedDerivation(_paired_node(model, w, v, transducer_id, derivation.children[0], None, None))


def _paired_node(model: TransductionModel, w: str, v: str, transducer_id: str, run: Derivation,
                 source_valency: Optional[Valency], target_valency: Optional[Valency]) -> PairedNode:
    trace: List[int] = []
    children: List[PairedNode] = []
    while True:
        kind, _, state, index = run.label
        trace.append(index)
        if kind == "stop":
            break
        dep, run = run.children
        action = model.transducers[transducer_id].actions(state)[index]
        _, child_w, child_v, child_transducer, _, _ = dep.label
        children.append(_paired_node(model, child_w, child_v, child_transducer, dep.children[0],
                                     action.source_valency, action.target_valency))
    return PairedNode(w, v, transducer_id, tuple(trace), tuple(children), source_valency, target_valency)


def transduce(model: AnyTransductionModel, source: Sequence[str],
              budget: EpsilonBudget = EpsilonBudget()) -> Union[TransductionResult, NoTranslation]:
    """
    Lowest-cost translation of ``source``.

    Returns:
        TransductionResult, or NoTranslation when a source word has no
        lexicon pair or no paired derivation fits the ε budget.
    """
    model = as_transduction_model(model)
    source = tuple(source)
    if not source:
        raise ValueError("cannot transduce an empty source sequence")
    known = {w for w, _ in model.bilingual_lexicon} | {w for w, _ in model.top_params}
    missing = tuple(dict.fromkeys(token for token in source if token not in known))
    if missing:
        return NoTranslation("no-lexicon-pair", missing)
    graph = transduction_chart(model, source, None, budget)
    best = graph.viterbi()
    if best is None:
        return NoTranslation("no-derivation", source)
    derivation = derivation_from_chart(model, best)
    return TransductionResult(derivation.target_yield(), best.cost, derivation)


def score_pair(model: AnyTransductionModel, source: Sequence[str], target: Sequence[str],
               budget: EpsilonBudget = EpsilonBudget()) -> Optional[Cost]:
    """Minimum cost of a paired derivation with both yields fixed, or None."""
    best = transduction_chart(model, source, target, budget).viterbi()
    return best.cost if best is not None else None


def best_pair_derivation(model: AnyTransductionModel, source: Sequence[str], target: Sequence[str],
                         budget: EpsilonBudget = EpsilonBudget()) -> Optional[TransductionResult]:
    model = as_transduction_model(model)
    best = transduction_chart(model, source, target, budget).viterbi()
    if best is None:
        return None
    derivation = derivation_from_chart(model, best)
    return TransductionResult(derivation.target_yield(), best.cost, derivation)


def derivation_cost(model: AnyTransductionModel, derivation: PairedDerivation) -> Cost:
    """
    Cost of a paired derivation, replaying every transducer run.

    Raises:
        ImpossibleDerivationError: a parameter used by the derivation is
            missing, or a child does not match the transition that wrote it.
    """
    model = as_transduction_model(model)
    root = derivation.root
    p_top = model.top_params.get((root.source_label, root.target_label))
    if not p_top:
        raise ImpossibleDerivationError(f"top({root.source_label}, {root.target_label})")
    return to_cost(p_top) + _node_cost(model, root)


def _node_cost(model: TransductionModel, node: PairedNode) -> Cost:
    pair = (node.source_label, node.target_label)
    p_lex = model.bilingual_lexicon.get(pair, {}).get(node.transducer)
    if not p_lex:
        raise ImpossibleDerivationError(f"lexicon({pair[0]}, {pair[1]}, {node.transducer})")
    transducer = model.transducers[node.transducer]
    cost = to_cost(p_lex)
    state = transducer.initial_state
    children = iter(node.children)
    stopped = False
    for index in node.trace:
        actions = transducer.actions(state)
        if stopped or not 0 <= index < len(actions):
            raise ImpossibleDerivationError(f"action({node.transducer}, {state}, {index})")
        action = actions[index]
        cost += to_cost(action.probability)
        if action.is_stop:
            stopped = True
            continue
        child = next(children, None)
        if (child is None or child.source_label != action.source_symbol
                or child.target_label != action.target_symbol
                or (not action.epsilon_source and child.source_valency is not action.source_valency)
                or (not action.epsilon_target and child.target_valency is not action.target_valency)):
            raise ImpossibleDerivationError(f"dependent of action({node.transducer}, {state}, {index})")
        cost += _node_cost(model, child)
        state = action.next_state
    if not stopped or next(children, None) is not None:
        raise ImpossibleDerivationError(f"incomplete run of {node.transducer}")
    return cost
