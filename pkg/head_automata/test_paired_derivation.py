import pytest

from head_automata.errors import InputFormatError
from head_automata.paired_derivation import PairedDerivation, PairedNode, TransductionResult, paired_node_from_json
from head_automata.symbols import EPSILON
from head_automata.transducer import Valency

L, R = Valency.LEFT, Valency.RIGHT


def _likes():
    john = PairedNode("john", "jean", "leaf", (0,), (), L, L)
    mary = PairedNode("mary", "marie", "leaf", (0,), (), R, L)
    return PairedDerivation(PairedNode("likes", "aime", "likes_aime", (0, 0, 0), (john, mary)))


def test_each_side_has_its_own_order():
    derivation = _likes()
    assert derivation.source_yield() == ("john", "likes", "mary")
    assert derivation.target_yield() == ("jean", "marie", "aime")


def test_side_trees():
    source = _likes().source_tree()
    assert [c.label for c in source.left] == ["john"]
    assert [c.label for c in source.right] == ["mary"]
    assert source.right[0].relation == "mary"
    target = _likes().target_tree()
    assert [c.label for c in target.left] == ["jean", "marie"]
    assert target.right == ()


def test_epsilon_nodes_are_invisible_on_their_empty_side():
    inserted = PairedNode(EPSILON, "z", "leaf", (0,), (), L, R)
    dropped = PairedNode("x", EPSILON, "leaf", (0,), (), R, L)
    derivation = PairedDerivation(PairedNode("h", "h", "m", (0, 0, 0), (inserted, dropped)))
    assert derivation.source_yield() == ("h", "x")
    assert derivation.target_yield() == ("h", "z")
    assert derivation.epsilon_source_nodes() == 1
    assert derivation.size() == 3
    assert [c.label for c in derivation.source_tree().right] == ["x"]


def test_json_round_trip():
    derivation = _likes()
    assert paired_node_from_json(derivation.to_json()) == derivation.root
    result = TransductionResult(derivation.target_yield(), 1.5, derivation)
    assert result.to_json()["target"] == ["jean", "marie", "aime"]


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("trace"),
    lambda d: d.update(source_valency="up"),
    lambda d: d.update(trace=["x"]),
    lambda d: d["children"][0].update(extra=True),
])
def test_malformed_json(mutate):
    doc = _likes().to_json()
    mutate(doc)
    with pytest.raises(InputFormatError) as raised:
        paired_node_from_json(doc, path="derivations.jsonl", line=3)
    assert raised.value.line == 3
