import math

import pytest

from head_automata.acceptor import AcceptorAction, HeadAcceptor
from head_automata.enumerate_derivations import derivations_with_yield, enumerate_derivations
from head_automata.errors import CapacityError
from head_automata.models import RelationalAcceptorModel
from head_automata.score_derivation import derivation_probability
from head_automata.symbols import RelationSet, Vocabulary
from head_automata.toy_models import ambiguous_parser_model, calibration_model, self_loop_model


def _model(states):
    m = HeadAcceptor.build("m", states)
    return RelationalAcceptorModel(Vocabulary(("a",)), RelationSet(("r",)), {"m": m},
                                   {("a", "r"): {"a": 1.0}}, {("r", "a"): {("m", 0): 1.0}},
                                   {("a", "m", 0): 1.0})


def _mass(model, **bounds):
    return sum(math.exp(-cost) for _, cost in enumerate_derivations(model, **bounds))


def test_stop_only_model_has_one_derivation():
    found = list(enumerate_derivations(_model([[AcceptorAction.stop(1.0)]]), max_depth=5, max_width=5))
    assert len(found) == 1
    tree, cost = found[0]
    assert tree.trace == (0,) and cost == 0.0


def test_optional_dependent():
    model = _model([[AcceptorAction.stop(0.5), AcceptorAction.left("r", 1, 0.5)], [AcceptorAction.stop(1.0)]])
    found = list(enumerate_derivations(model, max_depth=2, max_width=2))
    assert sorted(tree.size() for tree, _ in found) == [1, 2]


@pytest.mark.parametrize("depth", [1, 2, 3, 6])
def test_chain_mass_by_depth(depth):
    model = _model([[AcceptorAction.stop(0.5), AcceptorAction.left("r", 1, 0.5)], [AcceptorAction.stop(1.0)]])
    assert _mass(model, max_depth=depth, max_width=2) == pytest.approx(1 - 0.5 ** depth)


@pytest.mark.parametrize("stop, width", [(0.5, 2), (0.7, 3)])
def test_self_loop_mass_recursion(stop, width):
    expected = stop
    for depth in range(1, 4):
        assert _mass(self_loop_model(stop), max_depth=depth, max_width=width) == pytest.approx(expected)
        expected = stop * sum(((1 - stop) * expected) ** k for k in range(width + 1))


def test_each_tree_once_with_its_score():
    model = ambiguous_parser_model()
    found = list(enumerate_derivations(model, max_depth=3, max_width=2))
    trees = [tree for tree, _ in found]
    assert len(set(trees)) == len(trees)
    for tree, cost in found:
        assert cost == pytest.approx(derivation_probability(model, tree))


def test_node_bound():
    found = list(enumerate_derivations(calibration_model(), max_depth=3, max_width=2, max_nodes=3))
    assert found
    assert max(tree.size() for tree, _ in found) == 3


def test_trees_with_a_given_yield():
    found = derivations_with_yield(ambiguous_parser_model(), "a b c".split(), max_depth=2, max_width=2)
    assert [cost for _, cost in found] == pytest.approx([-math.log(0.06), -math.log(0.04)])
    assert [tree.label for tree, _ in found] == ["b", "a"]


def test_guard():
    with pytest.raises(CapacityError):
        list(enumerate_derivations(calibration_model(), max_depth=3, max_width=2, guard=100))


def test_depth_must_be_positive():
    with pytest.raises(ValueError):
        list(enumerate_derivations(calibration_model(), max_depth=0, max_width=2))
