"""
Supervised estimation of relational acceptor models from annotated treebanks.
"""

import logging
from collections import Counter
from dataclasses import dataclass, replace
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .acceptor import HeadAcceptor
from .errors import ImpossibleDerivationError, TreebankError
from .models import RelationalAcceptorModel
from .score_derivation import tree_events
from .symbols import RelationSet, Vocabulary
from .trees import OrderedDependencyTree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Treebank:
    trees: Tuple[OrderedDependencyTree, ...]
    vocabulary: Vocabulary
    relations: RelationSet

    def __post_init__(self):
        for index, tree in enumerate(self.trees):
            for node in tree.nodes():
                if node.label not in self.vocabulary:
                    raise TreebankError(f"tree {index}: word {node.label!r} is not in the vocabulary")
                if node.relation is not None and node.relation not in self.relations:
                    raise TreebankError(f"tree {index}: relation {node.relation!r} is not in the relation set")
            if tree.relation is not None:
                raise TreebankError(f"tree {index}: root carries relation {tree.relation!r}")

    @classmethod
    def from_trees(cls, trees: Iterable[OrderedDependencyTree]) -> "Treebank":
        """Treebank whose vocabulary and relations are the ones its trees use, in order of appearance."""
        trees = tuple(trees)
        words: Dict[str, None] = {}
        relations: Dict[str, None] = {}
        for tree in trees:
            for node in tree.nodes():
                words.setdefault(node.label)
                if node.relation is not None:
                    relations.setdefault(node.relation)
        return cls(trees, Vocabulary.from_symbols(words), RelationSet(tuple(relations)))


def _smoothed(counts: Counter, outcomes: Sequence[Hashable], delta: float) -> Dict[Hashable, float]:
    total = sum(counts[o] for o in outcomes) + delta * len(outcomes)
    row = {}
    for outcome in outcomes:
        p = (counts[outcome] + delta) / total
        if p > 0.0:
            row[outcome] = p
    return row


def estimate_acceptor_model(treebank: Treebank, automata: Iterable[HeadAcceptor], delta: float = 0.0,
                            omitted: Optional[List[str]] = None) -> RelationalAcceptorModel:
    """
    Relative-frequency estimate of every parameter, with optional add-delta smoothing.

    Args:
        treebank: fully annotated trees
        automata: automaton skeletons; their action lists fix the outcome sets
        delta: add-delta constant applied to every outcome set
        omitted: when given, receives one line per parameter row left out
            or kept from the skeleton because its context never occurs

    Returns:
        RelationalAcceptorModel. Actions whose estimate is zero are dropped
        from the automata; see reindex_tree.

    Raises:
        TreebankError: a tree uses an action, machine or state the skeletons
            do not have.
    """
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    skeletons = {a.id: a for a in automata}
    omitted = omitted if omitted is not None else []
    actions: Dict[Tuple[str, int], Counter] = {}
    dependency: Dict[Tuple[str, str], Counter] = {}
    lexicon: Dict[Tuple[str, str], Counter] = {}
    top: Counter = Counter()
    dependents_of: Dict[str, Dict[str, None]] = {}
    starts_of: Dict[str, Dict[Tuple[str, int], None]] = {}

    for index, tree in enumerate(treebank.trees):
        try:
            events = list(tree_events(skeletons, tree))
        except ImpossibleDerivationError as e:
            raise TreebankError(f"tree {index}: annotation does not fit the automata: {e.parameter}")
        for kind, key in events:
            if kind == "action":
                actions.setdefault(key[:2], Counter())[key[2]] += 1
            elif kind == "dependency":
                dependency.setdefault(key[:2], Counter())[key[2]] += 1
                dependents_of.setdefault(key[1], {}).setdefault(key[2])
            elif kind == "lexicon":
                lexicon.setdefault(key[:2], Counter())[key[2:]] += 1
                starts_of.setdefault(key[1], {}).setdefault(key[2:])
            else:
                top[key] += 1
                starts_of.setdefault(key[0], {}).setdefault(key[1:])

    estimated: Dict[str, HeadAcceptor] = {}
    for automaton in skeletons.values():
        states = []
        for q, skeleton_actions in enumerate(automaton.states):
            counts = actions.get((automaton.id, q))
            if counts is None and delta == 0.0:
                omitted.append(f"automaton {automaton.id} state {q}: never visited, skeleton probabilities kept")
                states.append(skeleton_actions)
                continue
            row = _smoothed(counts or Counter(), range(len(skeleton_actions)), delta)
            states.append(tuple(replace(skeleton_actions[i], probability=p) for i, p in row.items()))
        estimated[automaton.id] = HeadAcceptor(automaton.id, automaton.alphabet_kind, tuple(states),
                                               automaton.default_initial)

    dependency_params = {context: _smoothed(counts, list(dependents_of[context[1]]), delta)
                         for context, counts in dependency.items()}
    lexicon_params = {context: _smoothed(counts, list(starts_of[context[1]]), delta)
                      for context, counts in lexicon.items()}
    top_params = _smoothed(top, list(top), delta)

    for word, starts in starts_of.items():
        for automaton_id, state in starts:
            for relation in skeletons[automaton_id].emitted_symbols(state):
                if (word, relation) not in dependency_params:
                    line = f"dependency row ({word}, {relation}): context never observed"
                    if line not in omitted:
                        omitted.append(line)
    for line in omitted:
        logger.warning("⚠️ Estimation omitted %s", line)

    relations = list(treebank.relations)
    for automaton in skeletons.values():
        for q in range(automaton.state_count):
            for relation in automaton.emitted_symbols(q):
                if relation not in relations:
                    relations.append(relation)
    return RelationalAcceptorModel(treebank.vocabulary, RelationSet(tuple(relations)), estimated,
                                   dependency_params, lexicon_params, top_params)


def reindex_tree(tree: OrderedDependencyTree, skeletons: Iterable[HeadAcceptor],
                 model: RelationalAcceptorModel) -> OrderedDependencyTree:
    """
    Rewrite a tree's traces from skeleton action indices to the indices of
    an estimated model whose automata dropped zero-probability actions.
    """
    skeletons = {a.id: a for a in skeletons}

    def convert(node: OrderedDependencyTree) -> OrderedDependencyTree:
        skeleton = skeletons[node.automaton]
        target = model.automata[node.automaton]
        state = node.initial_state
        trace = []
        for index in node.trace:
            action = skeleton.actions(state)[index]
            signature = (action.kind, action.symbol, action.next_state)
            for new_index, candidate in enumerate(target.actions(state)):
                if (candidate.kind, candidate.symbol, candidate.next_state) == signature:
                    trace.append(new_index)
                    break
            else:
                raise ImpossibleDerivationError(f"action({node.automaton}, {state}, {index})")
            if not action.is_stop:
                state = action.next_state
        return OrderedDependencyTree(node.label, node.relation, node.automaton, node.initial_state, tuple(trace),
                                     tuple(convert(c) for c in node.left), tuple(convert(c) for c in node.right))

    return convert(tree)
