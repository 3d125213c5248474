"""
Brute-force enumeration of bounded derivation spaces.

Used as an oracle for the parser and the sampler at desk scale.
"""

import logging
from typing import Iterator, List, Optional, Tuple

from .acceptor import ActionKind
from .costs import Cost, to_cost
from .errors import CapacityError
from .models import RelationalAcceptorModel
from .trees import OrderedDependencyTree, tree_to_string

logger = logging.getLogger(__name__)

DEFAULT_GUARD = 10 ** 7

# (trace, left children, right children, cost, node count)
_Run = Tuple[Tuple[int, ...], Tuple[OrderedDependencyTree, ...], Tuple[OrderedDependencyTree, ...], Cost, int]


class _Enumerator:
    def __init__(self, model: RelationalAcceptorModel, max_depth: int, max_width: int,
                 max_nodes: Optional[int], guard: int):
        self.model = model
        self.max_depth = max_depth
        self.max_width = max_width
        self.max_nodes = max_nodes
        self.guard = guard
        self.configurations = 0

    def _tick(self) -> None:
        self.configurations += 1
        if self.configurations > self.guard:
            raise CapacityError(f"enumeration exceeded {self.guard} configurations")

    def node(self, word: str, relation: Optional[str], automaton: str, state: int, depth: int,
             budget: int) -> Iterator[Tuple[OrderedDependencyTree, Cost, int]]:
        """Subtrees headed by ``word`` started in (automaton, state), without the cost of choosing them."""
        if budget < 1:
            return
        for trace, left, right, cost, size in self.run(word, automaton, state, depth, 0, budget - 1):
            self._tick()
            yield OrderedDependencyTree(word, relation, automaton, state, trace, left, right), cost, size + 1

    def run(self, word: str, automaton: str, state: int, depth: int, width: int, budget: int) -> Iterator[_Run]:
        for index, action in enumerate(self.model.automata[automaton].actions(state)):
            action_cost = to_cost(action.probability)
            if action.is_stop:
                yield (index,), (), (), action_cost, 0
                continue
            if width >= self.max_width or depth >= self.max_depth or budget < 1:
                continue
            r = action.symbol
            for dependent, p_dep in self.model.dependency_params.get((word, r), {}).items():
                for (child_automaton, child_state), p_lex in self.model.lexicon_params.get((r, dependent), {}).items():
                    attach = action_cost + to_cost(p_dep) + to_cost(p_lex)
                    for child, child_cost, child_size in self.node(dependent, r, child_automaton, child_state,
                                                                   depth + 1, budget):
                        for trace, left, right, rest_cost, rest_size in self.run(
                                word, automaton, action.next_state, depth, width + 1, budget - child_size):
                            if action.kind is ActionKind.LEFT:
                                left, right = (child,) + left, right
                            else:
                                left, right = left, (child,) + right
                            yield ((index,) + trace, left, right, attach + child_cost + rest_cost,
                                   child_size + rest_size)


def enumerate_derivations(model: RelationalAcceptorModel, max_depth: int, max_width: int,
                          max_nodes: Optional[int] = None,
                          guard: int = DEFAULT_GUARD) -> Iterator[Tuple[OrderedDependencyTree, Cost]]:
    """
    Every tree with depth <= max_depth and <= max_width transitions per node.

    Args:
        model: toy-scale relational model
        max_depth: depth bound, the root alone has depth 1
        max_width: bound on transitions taken by one automaton run
        max_nodes: optional bound on the number of nodes per tree
        guard: abort after this many partial configurations

    Yields:
        (tree, cost) pairs, each tree exactly once.

    Raises:
        CapacityError: the guard was exceeded.
    """
    if max_depth < 1:
        raise ValueError(f"max_depth must be at least 1, got {max_depth}")
    enumerator = _Enumerator(model, max_depth, max_width, max_nodes, guard)
    budget = max_nodes if max_nodes is not None else float("inf")
    count = 0
    for (word, automaton, state), p in model.top_params.items():
        top_cost = to_cost(p)
        for tree, cost, _ in enumerator.node(word, None, automaton, state, 1, budget):
            count += 1
            yield tree, top_cost + cost
    logger.debug("enumerated %d derivations (%d configurations)", count, enumerator.configurations)


def derivations_with_yield(model: RelationalAcceptorModel, tokens, max_depth: int, max_width: int,
                           max_nodes: Optional[int] = None) -> List[Tuple[OrderedDependencyTree, Cost]]:
    """Enumerated derivations whose string is ``tokens``, cheapest first."""
    target = tuple(tokens)
    found = [(tree, cost) for tree, cost in enumerate_derivations(model, max_depth, max_width, max_nodes)
             if tree_to_string(tree) == target]
    found.sort(key=lambda item: item[1])
    return found
