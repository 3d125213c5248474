import math

import pytest

from head_automata.acceptor import AcceptorAction, HeadAcceptor
from head_automata.errors import ImpossibleDerivationError
from head_automata.models import RelationalAcceptorModel
from head_automata.score_derivation import derivation_probability, tree_events
from head_automata.symbols import RelationSet, Vocabulary
from head_automata.toy_models import ambiguous_parser_model
from head_automata.trees import OrderedDependencyTree


def _two_word_model():
    m = HeadAcceptor.build("m", [
        [AcceptorAction.left("r", 1, 0.5), AcceptorAction.stop(0.5)],
        [AcceptorAction.stop(0.5), AcceptorAction.right("r", 1, 0.5)],
    ])
    leaf = HeadAcceptor.build("leaf", [[AcceptorAction.stop(1.0)]])
    return RelationalAcceptorModel(
        Vocabulary(("a", "b")), RelationSet(("r",)), {"m": m, "leaf": leaf},
        {("a", "r"): {"b": 0.8, "a": 0.2}, ("b", "r"): {"a": 1.0}},
        {("r", "a"): {("leaf", 0): 1.0}, ("r", "b"): {("leaf", 0): 1.0}},
        {("a", "m", 0): 1.0})


def _b_under_a():
    child = OrderedDependencyTree("b", "r", "leaf", 0, (0,))
    return OrderedDependencyTree("a", None, "m", 0, (0, 0), left=(child,))


def test_cost_multiplies_every_event():
    # 0.5 (left r) * 0.8 (b) * 1.0 (leaf) * 1.0 (leaf stop) * 0.5 (stop)
    assert derivation_probability(_two_word_model(), _b_under_a()) == pytest.approx(-math.log(0.2))


def test_events_in_derivation_order():
    kinds = [event.kind for event in tree_events(_two_word_model().automata, _b_under_a())]
    assert kinds == ["top", "action", "dependency", "lexicon", "action", "action"]


def test_subtree_pays_the_lexicon_instead_of_top():
    model = ambiguous_parser_model()
    subtree = OrderedDependencyTree("c", "obj", "leaf", 0, (0,))
    assert derivation_probability(model, subtree) == pytest.approx(0.0)
    root = OrderedDependencyTree("c", None, "leaf", 0, (0,))
    assert derivation_probability(model, root) == pytest.approx(-math.log(0.78))
    assert derivation_probability(model, root, relation="obj") == pytest.approx(0.0)


def test_ambiguous_readings():
    model = ambiguous_parser_model()
    a, c = (OrderedDependencyTree(w, r, "leaf", 0, (0,)) for w, r in (("a", "subj"), ("c", "obj")))
    b_rooted = OrderedDependencyTree("b", None, "head_b", 0, (0, 0, 0), left=(a,), right=(c,))
    assert derivation_probability(model, b_rooted) == pytest.approx(-math.log(0.06))
    objects = tuple(OrderedDependencyTree(w, "obj", "leaf", 0, (0,)) for w in ("c", "b"))
    a_rooted = OrderedDependencyTree("a", None, "head_a", 0, (0, 0, 0), right=objects)
    assert derivation_probability(model, a_rooted) == pytest.approx(-math.log(0.04))


def _with_top(model, top):
    return RelationalAcceptorModel(model.vocabulary, model.relations, model.automata,
                                   model.dependency_params, model.lexicon_params, top)


def _b(relation="r"):
    return OrderedDependencyTree("b", relation, "leaf", 0, (0,))


@pytest.mark.parametrize("tree, top, parameter", [
    (OrderedDependencyTree("a", None, "gone", 0, (0,)), {("a", "gone", 0): 1.0}, "automaton gone"),
    (OrderedDependencyTree("a", None, "m", 0, (1,)), {("b", "m", 0): 1.0}, "top(a, m, 0)"),
    (OrderedDependencyTree("a", None, "m", 0, (7,)), None, "action m:0:7"),
    (OrderedDependencyTree("a", None, "m", 0, (0,), left=(_b(),)), None, "stop for a at m:1"),
    (OrderedDependencyTree("a", None, "m", 0, (1,), left=(_b(),)), None, "children of a not written by its trace"),
    (OrderedDependencyTree("a", None, "m", 0, (0, 0), left=(_b("s"),)), None, "relation r on arc a->b"),
    (OrderedDependencyTree("b", None, "m", 0, (0, 0), left=(_b(),)), {("b", "m", 0): 1.0}, "dependency(b, r, b)"),
])
def test_impossible_derivations(tree, top, parameter):
    model = _two_word_model()
    if top is not None:
        model = _with_top(model, top)
    with pytest.raises(ImpossibleDerivationError) as raised:
        derivation_probability(model, tree)
    assert raised.value.parameter == parameter
