"""
Scoring of ordered dependency trees.

The cost of a derivation is the sum of the costs of every event it uses: the
top (or lexicon) choice at the root, every automaton action including stops,
and the dependency and lexicon parameters paid when a dependent attaches.
"""

import logging
from typing import Iterator, Mapping, NamedTuple, Optional, Tuple

from .acceptor import ActionKind, HeadAcceptor
from .costs import Cost, to_cost
from .errors import ImpossibleDerivationError
from .models import RelationalAcceptorModel
from .trees import OrderedDependencyTree

logger = logging.getLogger(__name__)


class TreeEvent(NamedTuple):
    """
    One parameter use inside a tree.

    kind is "top" (key word, automaton, state), "lexicon" (relation, word,
    automaton, state), "action" (automaton, state, action index) or
    "dependency" (head word, relation, dependent word).
    """
    kind: str
    key: Tuple


def tree_events(automata: Mapping[str, HeadAcceptor], tree: OrderedDependencyTree,
                relation: Optional[str] = None) -> Iterator[TreeEvent]:
    """
    Walk a tree against automaton structures and yield the events it uses.

    Raises:
        ImpossibleDerivationError: the trace or the children do not fit the
            automata (unknown machine, bad action index, relation mismatch).
    """
    relation = relation if relation is not None else tree.relation
    if relation is None:
        yield TreeEvent("top", (tree.label, tree.automaton, tree.initial_state))
    else:
        yield TreeEvent("lexicon", (relation, tree.label, tree.automaton, tree.initial_state))
    yield from _node_events(automata, tree)


def _node_events(automata: Mapping[str, HeadAcceptor], tree: OrderedDependencyTree) -> Iterator[TreeEvent]:
    automaton = automata.get(tree.automaton)
    if automaton is None:
        raise ImpossibleDerivationError(f"automaton {tree.automaton}")
    state = tree.initial_state
    if not 0 <= state < automaton.state_count:
        raise ImpossibleDerivationError(f"state {tree.automaton}:{state}")
    left = iter(tree.left)
    right = iter(tree.right)
    stopped = False
    for index in tree.trace:
        if stopped:
            raise ImpossibleDerivationError(f"action after stop in {tree.automaton}:{state}")
        actions = automaton.actions(state)
        if not 0 <= index < len(actions):
            raise ImpossibleDerivationError(f"action {tree.automaton}:{state}:{index}")
        action = actions[index]
        yield TreeEvent("action", (tree.automaton, state, index))
        if action.is_stop:
            stopped = True
            continue
        child = next(left if action.kind is ActionKind.LEFT else right, None)
        if child is None:
            raise ImpossibleDerivationError(f"{action.kind.value} child for {tree.label} at {tree.automaton}:{state}")
        if child.relation != action.symbol:
            raise ImpossibleDerivationError(f"relation {action.symbol} on arc {tree.label}->{child.label}")
        yield TreeEvent("dependency", (tree.label, action.symbol, child.label))
        yield TreeEvent("lexicon", (action.symbol, child.label, child.automaton, child.initial_state))
        yield from _node_events(automata, child)
        state = action.next_state
    if not stopped:
        raise ImpossibleDerivationError(f"stop for {tree.label} at {tree.automaton}:{state}")
    if next(left, None) is not None or next(right, None) is not None:
        raise ImpossibleDerivationError(f"children of {tree.label} not written by its trace")


def event_cost(model: RelationalAcceptorModel, event: TreeEvent) -> Cost:
    kind, key = event
    if kind == "top":
        p = model.top_params.get(key)
    elif kind == "lexicon":
        p = model.lexicon_params.get(key[:2], {}).get(key[2:])
    elif kind == "dependency":
        p = model.dependency_params.get(key[:2], {}).get(key[2])
    else:
        automaton, state, index = key
        p = model.automata[automaton].actions(state)[index].probability
    if p is None or p <= 0.0:
        raise ImpossibleDerivationError(f"{kind}({', '.join(map(str, key))})")
    return to_cost(p)


def derivation_probability(model: RelationalAcceptorModel, tree: OrderedDependencyTree,
                           relation: Optional[str] = None) -> Cost:
    """
    Cost of a derivation, -ln P(D).

    A root tree (no relation) pays its top parameter. Passing ``relation``, or
    scoring a subtree that carries one, pays the lexicon parameter instead and
    gives the cost of P(D | w, r).
    """
    total = 0.0
    for event in tree_events(model.automata, tree, relation):
        total += event_cost(model, event)
    return total
