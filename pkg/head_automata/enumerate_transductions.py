"""
Brute-force enumeration of paired derivations for one source sentence.

Only derivations that can still match the source are explored: every non-ε
source word a node introduces must be available in the remaining multiset of
source tokens. The survivors are filtered on their exact source yield.
"""

import logging
from collections import Counter
from typing import Iterator, Optional, Sequence, Tuple

from .costs import Cost, to_cost
from .errors import CapacityError
from .models import as_transduction_model
from .paired_derivation import PairedDerivation, PairedNode
from .symbols import EPSILON
from .transduce import AnyTransductionModel, EpsilonBudget
from .transducer import Valency

logger = logging.getLogger(__name__)

DEFAULT_GUARD = 10 ** 7


class _Enumerator:
    def __init__(self, model, budget: EpsilonBudget, guard: int):
        self.model = model
        self.per_head = budget.per_head
        self.guard = guard
        self.configurations = 0

    def _tick(self) -> None:
        self.configurations += 1
        if self.configurations > self.guard:
            raise CapacityError(f"enumeration exceeded {self.guard} configurations")

    def node(self, w: str, v: str, transducer_id: str, source_valency: Optional[Valency],
             target_valency: Optional[Valency], nodes_left: int, eps_left: int, pool: Counter):
        """Yield (node, cost incl. its lexicon parameter, nodes used, ε nodes used, pool after)."""
        if nodes_left < 1:
            return
        own_eps = 0
        if w == EPSILON:
            if eps_left < 1:
                return
            own_eps = 1
        else:
            if pool[w] < 1:
                return
            pool = pool.copy()
            pool[w] -= 1
        transducer = self.model.transducers[transducer_id]
        p_lex = self.model.bilingual_lexicon[(w, v)][transducer_id]
        for trace, children, cost, nodes, eps, rest in self.run(
                transducer_id, transducer.initial_state, 0, nodes_left - 1, eps_left - own_eps, pool,
                w != EPSILON, v != EPSILON):
            self._tick()
            node = PairedNode(w, v, transducer_id, trace, children, source_valency, target_valency)
            yield node, to_cost(p_lex) + cost, nodes + 1, eps + own_eps, rest

    def run(self, transducer_id: str, state: int, k: int, nodes_left: int, eps_left: int, pool: Counter,
            reads_source: bool, writes_target: bool):
        for index, action in enumerate(self.model.transducers[transducer_id].actions(state)):
            action_cost = to_cost(action.probability)
            if action.is_stop:
                yield (index,), (), action_cost, 0, 0, pool
                continue
            w, v = action.source_symbol, action.target_symbol
            if w == EPSILON and v == EPSILON:
                continue
            if (w != EPSILON and not reads_source) or (v != EPSILON and not writes_target):
                continue
            if w == EPSILON and k >= self.per_head:
                continue
            if nodes_left < 1:
                continue
            next_k = k + 1 if w == EPSILON else k
            for child_transducer in self.model.bilingual_lexicon.get((w, v), {}):
                for child, child_cost, child_nodes, child_eps, after_child in self.node(
                        w, v, child_transducer, action.source_valency, action.target_valency,
                        nodes_left, eps_left, pool):
                    for trace, children, rest_cost, rest_nodes, rest_eps, after in self.run(
                            transducer_id, action.next_state, next_k, nodes_left - child_nodes,
                            eps_left - child_eps, after_child, reads_source, writes_target):
                        yield ((index,) + trace, (child,) + children, action_cost + child_cost + rest_cost,
                               child_nodes + rest_nodes, child_eps + rest_eps, after)


def enumerate_transductions(model: AnyTransductionModel, source: Sequence[str], max_nodes: int,
                            budget: EpsilonBudget = EpsilonBudget(),
                            guard: int = DEFAULT_GUARD) -> Iterator[Tuple[PairedDerivation, Cost]]:
    """
    Every paired derivation with at most ``max_nodes`` nodes whose source
    yield is ``source`` and whose ε-sourced material fits ``budget``.

    Raises:
        CapacityError: more than ``guard`` partial configurations were visited.
    """
    model = as_transduction_model(model)
    source = tuple(source)
    total = budget.total(len(source)) if model.has_epsilon_source else 0
    enumerator = _Enumerator(model, budget, guard)
    count = 0
    for (w, v), p_top in model.top_params.items():
        if w == EPSILON:
            continue
        for transducer_id in model.bilingual_lexicon.get((w, v), {}):
            for node, cost, _, _, rest in enumerator.node(w, v, transducer_id, None, None, max_nodes, total,
                                                          Counter(source)):
                if +rest:
                    continue
                derivation = PairedDerivation(node)
                if derivation.source_yield() != source:
                    continue
                count += 1
                yield derivation, to_cost(p_top) + cost
    logger.debug("enumerated %d paired derivations (%d configurations)", count, enumerator.configurations)
