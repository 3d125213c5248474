"""
Sampling derivations from a relational acceptor model.

Draws follow the generative process: pick (w0, m0, q0) from the top
distribution, run the automaton action by action, and for each transition
choose the dependent word and then its automaton start. Trees deeper than
``max_depth`` (or wider or larger than the optional bounds) are rejected and
redrawn from the same generator.
"""

import logging
from typing import Callable, Dict, Hashable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .acceptor import ActionKind
from .errors import ImpossibleDerivationError, SamplingFailureError
from .models import RelationalAcceptorModel
from .trees import OrderedDependencyTree

logger = logging.getLogger(__name__)

DEFAULT_RETRIES = 1000
# Guard against runaway recursion in models that rarely stop
MAX_SAMPLE_NODES = 100_000


class _Rejected(Exception):
    pass


class _Categorical:
    """A discrete distribution prepared for repeated inverse-CDF draws."""

    def __init__(self, outcomes: Sequence[Hashable], probabilities: Sequence[float]):
        self.outcomes = list(outcomes)
        self.cumulative = np.cumsum(np.asarray(probabilities, dtype=float))

    def draw(self, rng: np.random.Generator):
        u = rng.random() * self.cumulative[-1]
        index = int(np.searchsorted(self.cumulative, u, side="right"))
        return self.outcomes[min(index, len(self.outcomes) - 1)]


class _Sampler:
    def __init__(self, model: RelationalAcceptorModel, max_depth: int, max_width: Optional[int] = None,
                 max_nodes: int = MAX_SAMPLE_NODES):
        self.model = model
        self.max_depth = max_depth
        self.max_width = max_width
        self.max_nodes = max_nodes
        self._tables: Dict[Tuple, _Categorical] = {}
        self.nodes = 0

    def _table(self, key: Tuple, row: Callable[[], Dict]) -> _Categorical:
        table = self._tables.get(key)
        if table is None:
            values = row()
            table = _Categorical(list(values), list(values.values()))
            self._tables[key] = table
        return table

    def top(self, rng: np.random.Generator) -> Tuple[str, str, int]:
        return self._table(("top",), lambda: self.model.top_params).draw(rng)

    def node(self, rng: np.random.Generator, word: str, relation, automaton_id: str, state: int,
             depth: int) -> OrderedDependencyTree:
        if depth > self.max_depth:
            raise _Rejected()
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise _Rejected()
        automaton = self.model.automata[automaton_id]
        initial = state
        trace: List[int] = []
        left: List[OrderedDependencyTree] = []
        right: List[OrderedDependencyTree] = []
        while True:
            actions = automaton.actions(state)
            index = self._table(("action", automaton_id, state),
                                lambda: {i: a.probability for i, a in enumerate(actions)}).draw(rng)
            trace.append(index)
            action = actions[index]
            if action.is_stop:
                break
            if self.max_width is not None and len(trace) > self.max_width:
                raise _Rejected()
            r = action.symbol
            row = self.model.dependency_params.get((word, r))
            if row is None:
                raise ImpossibleDerivationError(f"dependency({word}, {r})")
            dependent = self._table(("dependency", word, r), lambda: row).draw(rng)
            starts = self.model.lexicon_params.get((r, dependent))
            if starts is None:
                raise ImpossibleDerivationError(f"lexicon({r}, {dependent})")
            child_automaton, child_state = self._table(("lexicon", r, dependent), lambda: starts).draw(rng)
            child = self.node(rng, dependent, r, child_automaton, child_state, depth + 1)
            (left if action.kind is ActionKind.LEFT else right).append(child)
            state = action.next_state
        return OrderedDependencyTree(word, relation, automaton_id, initial, tuple(trace), tuple(left), tuple(right))


def _draw(sampler: _Sampler, rng: np.random.Generator, retries: int) -> OrderedDependencyTree:
    for attempt in range(1, retries + 1):
        sampler.nodes = 0
        word, automaton_id, state = sampler.top(rng)
        try:
            return sampler.node(rng, word, None, automaton_id, state, 1)
        except _Rejected:
            logger.debug("sample attempt %d exceeded the bounds", attempt)
    raise SamplingFailureError(f"no derivation within depth {sampler.max_depth} after {retries} attempts")


def sample_derivations(model: RelationalAcceptorModel, seed: int, count: int, max_depth: int,
                       retries: int = DEFAULT_RETRIES, max_width: Optional[int] = None,
                       max_nodes: Optional[int] = None) -> Iterator[OrderedDependencyTree]:
    """
    Yield ``count`` trees from one generator seeded with ``seed``.

    Args:
        model: relational acceptor model
        seed: generator seed; equal seeds give equal streams
        count: number of trees
        max_depth: depth bound, the root alone has depth 1
        retries: rejected draws allowed per tree
        max_width: optional bound on the transitions of one automaton run
        max_nodes: optional bound on the nodes of one tree

    Raises:
        SamplingFailureError: ``retries`` draws in a row were rejected.
    """
    if max_depth < 1:
        raise ValueError(f"max_depth must be at least 1, got {max_depth}")
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    if max_width is not None and max_width < 0:
        raise ValueError(f"max_width must be non-negative, got {max_width}")
    if max_nodes is not None and max_nodes < 1:
        raise ValueError(f"max_nodes must be at least 1, got {max_nodes}")
    rng = np.random.default_rng(seed)
    sampler = _Sampler(model, max_depth, max_width, min(max_nodes or MAX_SAMPLE_NODES, MAX_SAMPLE_NODES))
    for _ in range(count):
        yield _draw(sampler, rng, retries)


def sample_derivation(model: RelationalAcceptorModel, seed: int, max_depth: int,
                      retries: int = DEFAULT_RETRIES) -> OrderedDependencyTree:
    return next(sample_derivations(model, seed, 1, max_depth, retries))
