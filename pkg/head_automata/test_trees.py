import pytest

from head_automata.errors import InputFormatError
from head_automata.symbols import EPSILON
from head_automata.trees import OrderedDependencyTree, tree_from_json, tree_to_string


def _leaf(label, relation="r"):
    return OrderedDependencyTree(label, relation, "leaf", 0, (0,))


def _tree():
    # right children are stored in write order, outermost first
    return OrderedDependencyTree("h", None, "m", 0, (0, 1, 2, 3, 4),
                                 left=(_leaf("l1"), _leaf("l2")),
                                 right=(_leaf("r_outer"), _leaf("r_inner")))


def test_yield_reverses_right_children():
    assert tree_to_string(_tree()) == ("l1", "l2", "h", "r_inner", "r_outer")


def test_epsilon_nodes_write_nothing():
    tree = OrderedDependencyTree(EPSILON, None, "m", 0, (0, 1), left=(_leaf("a"),))
    assert tree_to_string(tree) == ("a",)


def test_shape():
    tree = _tree()
    assert tree.size() == 5
    assert tree.depth() == 2
    assert tree.is_root and not tree.left[0].is_root
    assert [n.label for n in tree.nodes()] == ["h", "l1", "l2", "r_outer", "r_inner"]


def test_json_round_trip():
    tree = _tree()
    assert tree_from_json(tree.to_json()) == tree


@pytest.mark.parametrize("mutate, reason", [
    (lambda d: d.update(extra=1), "unknown key"),
    (lambda d: d.pop("trace"), "missing key"),
    (lambda d: d.update(trace=["0"]), "trace"),
    (lambda d: d.update(initial_state=True), "initial_state"),
    (lambda d: d["left"][0].update(relation=3), "tree.left[0]"),
])
def test_bad_trees_name_the_line(mutate, reason):
    doc = _tree().to_json()
    mutate(doc)
    with pytest.raises(InputFormatError) as raised:
        tree_from_json(doc, path="trees.jsonl", line=7)
    assert raised.value.line == 7
    assert reason in raised.value.reason
    assert str(raised.value).startswith("trees.jsonl:7:")
