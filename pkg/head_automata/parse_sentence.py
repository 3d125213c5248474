"""
Maximum-probability dependency parsing with a relational acceptor model.

Chart items mirror the way an automaton writes its dependents from the
outside in. A run item (m, i, h, j, q) is the best way for the automaton m of
the word at h, now in state q, to finish while its remaining left dependents
cover [i, h) and its remaining right dependents cover [h+1, j). A left
transition takes the outermost remaining left span [i, k), a right transition
the outermost remaining right span [k, j). An attach item (a, b, r, w) is
the best subtree covering [a, b) that attaches under head word w via r; it
pays the dependency and lexicon parameters.
"""

import logging
from dataclasses import dataclass
from typing import Hashable, Iterator, List, Optional, Sequence, Tuple, Union

from .acceptor import ActionKind
from .costs import Cost, to_cost
from .hypergraph import ChartStats, Derivation, EdgeSpec, Hypergraph
from .models import RelationalAcceptorModel
from .trees import OrderedDependencyTree

logger = logging.getLogger(__name__)

GOAL = ("goal",)


@dataclass(frozen=True)
class ParseResult:
    tree: OrderedDependencyTree
    cost: Cost
    stats: Optional[ChartStats] = None

    def to_json(self) -> dict:
        return {"tree": self.tree.to_json(), "cost": self.cost}


@dataclass(frozen=True)
class NoParse:
    reason: str
    token: Optional[str] = None

    def to_json(self) -> dict:
        return {"tree": None, "cost": None, "reason": self.reason, "token": self.token}


class _ParseChart:
    def __init__(self, model: RelationalAcceptorModel, tokens: Tuple[str, ...]):
        self.model = model
        self.tokens = tokens
        self.n = len(tokens)

    def expand(self, key: Hashable) -> Iterator[EdgeSpec]:
        kind = key[0]
        if kind == "run":
            yield from self._run(*key[1:])
        elif kind == "attach":
            yield from self._attach(*key[1:])
        else:
            yield from self._goal()

    def _goal(self) -> Iterator[EdgeSpec]:
        for h, word in enumerate(self.tokens):
            for (automaton, state), p in self.model.top_by_word.get(word, ()):
                yield [("run", automaton, 0, h, self.n, state)], to_cost(p), ("top", h, automaton, state)

    def _run(self, automaton: str, i: int, h: int, j: int, state: int) -> Iterator[EdgeSpec]:
        word = self.tokens[h]
        for index, action in enumerate(self.model.automata[automaton].actions(state)):
            cost = to_cost(action.probability)
            if action.is_stop:
                if i == h and j == h + 1:
                    yield (), cost, ("stop", index)
                continue
            r = action.symbol
            if action.kind is ActionKind.LEFT:
                for k in range(i + 1, h + 1):
                    yield ([("attach", i, k, r, word), ("run", automaton, k, h, j, action.next_state)],
                           cost, ("left", index))
            else:
                for k in range(j - 1, h, -1):
                    yield ([("attach", k, j, r, word), ("run", automaton, i, h, k, action.next_state)],
                           cost, ("right", index))

    def _attach(self, a: int, b: int, relation: str, head_word: str) -> Iterator[EdgeSpec]:
        dependents = self.model.dependency_params.get((head_word, relation), {})
        for d in range(a, b):
            word = self.tokens[d]
            p_dep = dependents.get(word)
            if p_dep is None:
                continue
            dep_cost = to_cost(p_dep)
            for (automaton, state), p_lex in self.model.lexicon_params.get((relation, word), {}).items():
                yield ([("run", automaton, a, d, b, state)], dep_cost + to_cost(p_lex),
                       ("dep", d, relation, automaton, state))


def _tree(tokens: Tuple[str, ...], derivation: Derivation) -> OrderedDependencyTree:
    """Rebuild the tree of a goal derivation."""
    _, h, automaton, state = derivation.label
    return _node(tokens, h, None, automaton, state, derivation.children[0])


def _node(tokens: Tuple[str, ...], h: int, relation: Optional[str], automaton: str, state: int,
          run: Derivation) -> OrderedDependencyTree:
    trace: List[int] = []
    left: List[OrderedDependencyTree] = []
    right: List[OrderedDependencyTree] = []
    while True:
        kind, index = run.label[0], run.label[1]
        trace.append(index)
        if kind == "stop":
            break
        attach, run = run.children
        _, d, r, child_automaton, child_state = attach.label
        child = _node(tokens, d, r, child_automaton, child_state, attach.children[0])
        (left if kind == "left" else right).append(child)
    return OrderedDependencyTree(tokens[h], relation, automaton, state, tuple(trace), tuple(left), tuple(right))


def _chart(model: RelationalAcceptorModel, tokens: Sequence[str]) -> Union[Tuple[Tuple[str, ...], Hypergraph], NoParse]:
    tokens = tuple(tokens)
    if not tokens:
        raise ValueError("cannot parse an empty token sequence")
    for token in tokens:
        if token not in model.vocabulary:
            return NoParse("unknown-word", token)
    graph = Hypergraph.build(GOAL, _ParseChart(model, tokens).expand)
    return tokens, graph


def parse(model: RelationalAcceptorModel, tokens: Sequence[str]) -> Union[ParseResult, NoParse]:
    """
    Best derivation whose string is ``tokens``.

    Args:
        model: relational acceptor model
        tokens: non-empty input sentence

    Returns:
        ParseResult, or NoParse when a token is out of vocabulary or no
        derivation exists.
    """
    built = _chart(model, tokens)
    if isinstance(built, NoParse):
        return built
    tokens, graph = built
    derivation = graph.viterbi()
    stats = graph.stats
    if derivation is None:
        logger.debug("no parse for %d tokens (%d chart nodes)", len(tokens), stats.nodes)
        return NoParse("no-derivation")
    return ParseResult(_tree(tokens, derivation), derivation.cost, stats)


def parse_nbest(model: RelationalAcceptorModel, tokens: Sequence[str], n: int) -> List[ParseResult]:
    """The ``n`` best distinct derivations, cheapest first; empty when there is no parse."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    built = _chart(model, tokens)
    if isinstance(built, NoParse):
        return []
    tokens, graph = built
    return [ParseResult(_tree(tokens, d), d.cost, graph.stats) for d in graph.kbest(n)]


def chart_stats(model: RelationalAcceptorModel, tokens: Sequence[str]) -> ChartStats:
    built = _chart(model, tokens)
    if isinstance(built, NoParse):
        return ChartStats(0, 0)
    return built[1].stats
