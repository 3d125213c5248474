import itertools
import math

import numpy as np
import pytest

from head_automata.em_train import uniform_constrained_model
from head_automata.enumerate_transductions import enumerate_transductions
from head_automata.errors import ImpossibleDerivationError
from head_automata.models import TransductionModel
from head_automata.paired_derivation import NoTranslation, PairedDerivation, PairedNode, TransductionResult
from head_automata.symbols import EPSILON, Vocabulary
from head_automata.toy_models import (
    END_MARKER,
    SEQUENTIAL_EDGES,
    SEQUENTIAL_STOP,
    identity_translator,
    random_transduction_model,
    reordering_translator,
    separation_witness,
    sequential_translator,
    yes_translator,
)
from head_automata.transduce import EpsilonBudget, best_pair_derivation, derivation_cost, score_pair, transduce
from head_automata.transducer import HeadTransducer, TransducerAction, Valency


def _inserting_model():
    """(h, h) may insert any number of z's on its left; each insertion is an ε-sourced node."""
    h = HeadTransducer.build("h", [[
        TransducerAction.transition(EPSILON, "z", Valency.LEFT, Valency.LEFT, 0, 0.5),
        TransducerAction.stop(0.5),
    ]])
    leaf = HeadTransducer.build("leaf", [[TransducerAction.stop(1.0)]])
    return TransductionModel(Vocabulary(("h", EPSILON), includes_epsilon=True),
                             Vocabulary(("h", "z")), {"h": h, "leaf": leaf},
                             {("h", "h"): {"h": 1.0}, (EPSILON, "z"): {"leaf": 1.0}}, {("h", "h"): 1.0})


def test_single_word():
    result = transduce(yes_translator(), ["yes"])
    assert result.target == ("oui",)
    assert result.cost == 0.0


def test_identity_on_every_short_sentence():
    model = identity_translator()
    for n in range(1, 6):
        expected = math.log(3) + (2 * n - 1) * math.log(4)
        for source in itertools.product("abc", repeat=n):
            result = transduce(model, source)
            assert result.target == source
            assert result.cost == pytest.approx(expected), source


def test_reordering():
    model = reordering_translator()
    result = transduce(model, "john likes mary".split())
    assert result.target == ("jean", "marie", "aime")
    assert result.cost == pytest.approx(-math.log(0.336))
    assert result.derivation.source_yield() == ("john", "likes", "mary")
    swapped = transduce(model, "mary likes john".split())
    assert swapped.target == ("marie", "jean", "aime")
    assert swapped.cost == pytest.approx(-math.log(0.096))


def test_cost_table():
    table = reordering_translator().cost_table()
    assert len(table) == 12
    assert table[0] == ("top", ("likes", "aime"), pytest.approx(-math.log(0.8)))
    costs = {(kind, key): cost for kind, key, cost in table}
    used = [("top", ("likes", "aime")), ("lexicon", ("likes", "aime", "likes_aime")),
            ("action", ("likes_aime", 0, 0)), ("action", ("likes_aime", 1, 0)), ("action", ("likes_aime", 2, 0)),
            ("lexicon", ("john", "jean", "leaf")), ("lexicon", ("mary", "marie", "leaf")), ("action", ("leaf", 0, 0))]
    assert sum(costs[entry] for entry in used) == pytest.approx(-math.log(0.336))


@pytest.mark.parametrize("source", [["john", "likes", "mary"], ["mary", "likes", "john"], ["john"]])
def test_reordering_matches_enumeration(source):
    model = reordering_translator()
    oracle = sorted(enumerate_transductions(model, source, max_nodes=len(source)), key=lambda item: item[1])
    result = transduce(model, source)
    assert result.cost == pytest.approx(oracle[0][1])
    assert result.target == oracle[0][0].target_yield()


def test_scoring_a_pair_agrees_with_decoding():
    model = reordering_translator()
    source = "john likes mary".split()
    result = transduce(model, source)
    assert score_pair(model, source, result.target) == pytest.approx(result.cost)
    assert score_pair(model, source, ["aime", "jean", "marie"]) is None
    pair = best_pair_derivation(model, source, result.target)
    assert pair.derivation == result.derivation
    assert best_pair_derivation(model, source, ["jean"]) is None


def _run_fst(source):
    state, output, p = 0, [], 1.0
    for symbol in source:
        out, state, q = SEQUENTIAL_EDGES[(state, symbol)]
        output.append(out)
        p *= q
    return tuple(output), p * SEQUENTIAL_STOP[state]


def test_left_to_right_transducer_is_its_fst():
    model = sequential_translator()
    for n in range(0, 6):
        for source in itertools.product("ab", repeat=n):
            output, p = _run_fst(source)
            result = transduce(model, source + (END_MARKER,))
            assert result.target == output + (END_MARKER,), source
            assert result.cost == pytest.approx(-math.log(p)), source


@pytest.mark.parametrize("n", [2, 4, 8])
def test_moving_a_word_across_the_sentence(n):
    source = ["y", "h"] + ["x"] * n
    result = transduce(separation_witness(), source)
    assert result.target == tuple(["h"] + ["x"] * n + ["y"])
    assert result.cost == pytest.approx((n + 1) * math.log(2))


def test_no_translation():
    model = reordering_translator()
    assert transduce(model, ["likes", "bob", "bob"]) == NoTranslation("no-lexicon-pair", ("bob",))
    assert transduce(model, ["likes"]) == NoTranslation("no-derivation", ("likes",))
    assert transduce(model, ["likes"]).to_json()["target"] is None
    with pytest.raises(ValueError):
        transduce(model, [])


def test_epsilon_budget():
    model = _inserting_model()
    assert transduce(model, ["h"]).target == ("h",)
    assert score_pair(model, ["h"], ["z", "z", "h"]) == pytest.approx(3 * math.log(2))
    assert score_pair(model, ["h"], ["z", "z", "h"], EpsilonBudget(per_head=1)) is None
    assert score_pair(model, ["h"], ["z", "z", "h"], EpsilonBudget(total_factor=1)) is None
    assert score_pair(model, ["h"], ["z", "h"], EpsilonBudget(per_head=1, total_factor=1)) == pytest.approx(
        2 * math.log(2))
    with pytest.raises(ValueError):
        EpsilonBudget(per_head=-1)


def test_constrained_model_decodes_through_its_embedding():
    model = uniform_constrained_model([("a", "x"), ("b", "y")])
    result = transduce(model, ["a", "b"])
    assert sorted(result.target) == ["x", "y"]
    assert derivation_cost(model, result.derivation) == pytest.approx(result.cost)


def test_derivation_cost_replays_the_runs():
    model = reordering_translator()
    result = transduce(model, "john likes mary".split())
    assert derivation_cost(model, result.derivation) == pytest.approx(result.cost)
    root = result.derivation.root
    broken = PairedDerivation(PairedNode(root.source_label, root.target_label, root.transducer, root.trace,
                                         tuple(reversed(root.children))))
    with pytest.raises(ImpossibleDerivationError):
        derivation_cost(model, broken)


def _random_case(seed):
    rng = np.random.default_rng(seed)
    epsilon = seed % 3 == 0
    model = random_transduction_model(rng, epsilon=epsilon)
    sentences = [tuple(rng.choice(["a", "b"], size=int(rng.integers(1, 4)))) for _ in range(4)]
    return model, [tuple(str(w) for w in s) for s in sentences]


@pytest.mark.parametrize("seed", range(100))
def test_random_models_agree_with_enumeration(seed):
    model, sentences = _random_case(seed)
    budget = EpsilonBudget(per_head=1, total_factor=0.5)
    for source in sentences:
        limit = len(source) + budget.total(len(source))
        costs = [cost for _, cost in enumerate_transductions(model, source, limit, budget)]
        result = transduce(model, source, budget)
        if not costs:
            assert isinstance(result, NoTranslation), source
            continue
        assert isinstance(result, TransductionResult), source
        assert result.cost == pytest.approx(min(costs)), source
        assert result.derivation.source_yield() == source
        assert result.derivation.target_yield() == result.target
        assert result.derivation.epsilon_source_nodes() <= budget.total(len(source))
        assert derivation_cost(model, result.derivation) == pytest.approx(result.cost)
        assert score_pair(model, source, result.target, budget) == pytest.approx(result.cost)


@pytest.mark.parametrize("seed", range(60))
def test_scoring_every_target_agrees_with_enumeration(seed):
    model, sentences = _random_case(seed)
    budget = EpsilonBudget(per_head=1, total_factor=0.5)
    targets = [t for n in range(5) for t in itertools.product(["x", "y"], repeat=n)]
    for source in sentences:
        limit = len(source) + budget.total(len(source))
        best = {}
        for derivation, cost in enumerate_transductions(model, source, limit, budget):
            target = derivation.target_yield()
            best[target] = min(cost, best.get(target, math.inf))
        for target in targets:
            cost = score_pair(model, source, target, budget)
            if target in best:
                assert cost == pytest.approx(best[target]), (source, target)
            else:
                assert cost is None, (source, target)
