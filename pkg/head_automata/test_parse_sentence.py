import itertools
import math
from functools import lru_cache

import numpy as np
import pytest

from head_automata.enumerate_derivations import enumerate_derivations
from head_automata.parse_sentence import NoParse, ParseResult, chart_stats, parse, parse_nbest
from head_automata.score_derivation import derivation_probability
from head_automata.toy_models import ambiguous_parser_model, cfg_cascade, chain_model, random_acceptor_model
from head_automata.trees import tree_to_string

MAX_TOKENS = 4


def test_best_of_two_readings():
    result = parse(ambiguous_parser_model(), "a b c".split())
    assert isinstance(result, ParseResult)
    assert result.tree.label == "b"
    assert [c.label for c in result.tree.left] == ["a"]
    assert [c.label for c in result.tree.right] == ["c"]
    assert result.cost == pytest.approx(-math.log(0.06))
    assert result.stats.nodes > 0


def test_nbest_lists_both_readings_then_stops():
    results = parse_nbest(ambiguous_parser_model(), "a b c".split(), 5)
    assert [r.cost for r in results] == pytest.approx([-math.log(0.06), -math.log(0.04)])
    second = results[1].tree
    assert second.label == "a" and [c.label for c in second.right] == ["c", "b"]
    assert tree_to_string(second) == ("a", "b", "c")


def test_single_word():
    result = parse(ambiguous_parser_model(), ["c"])
    assert result.cost == pytest.approx(-math.log(0.78))
    assert result.tree.trace == (0,)


@pytest.mark.parametrize("tokens, expected", [
    (["a", "d"], NoParse("unknown-word", "d")),
    (["b"], NoParse("no-derivation")),
    (["c", "c"], NoParse("no-derivation")),
])
def test_no_parse(tokens, expected):
    assert parse(ambiguous_parser_model(), tokens) == expected
    assert parse_nbest(ambiguous_parser_model(), tokens, 2) == []


def test_no_parse_record():
    assert NoParse("unknown-word", "d").to_json() == {"tree": None, "cost": None, "reason": "unknown-word",
                                                      "token": "d"}


def test_bad_arguments():
    with pytest.raises(ValueError):
        parse(ambiguous_parser_model(), [])
    with pytest.raises(ValueError):
        parse_nbest(ambiguous_parser_model(), ["c"], 0)


def _oracle(model):
    """Every derivation with at most MAX_TOKENS nodes, grouped by yield, cheapest first."""
    by_yield = {}
    for tree, cost in enumerate_derivations(model, max_depth=MAX_TOKENS, max_width=MAX_TOKENS - 1,
                                            max_nodes=MAX_TOKENS):
        by_yield.setdefault(tree_to_string(tree), []).append(cost)
    for costs in by_yield.values():
        costs.sort()
    return by_yield


@pytest.mark.parametrize("seed", range(200))
def test_random_models_agree_with_enumeration(seed):
    rng = np.random.default_rng(seed)
    model = random_acceptor_model(rng)
    by_yield = _oracle(model)
    yields = sorted(by_yield)
    picked = [yields[i] for i in rng.choice(len(yields), size=min(10, len(yields)), replace=False)]
    for tokens in picked:
        result = parse(model, tokens)
        assert isinstance(result, ParseResult), tokens
        assert result.cost == pytest.approx(by_yield[tokens][0]), tokens
        assert tree_to_string(result.tree) == tokens
        assert derivation_probability(model, result.tree) == pytest.approx(result.cost)
        nbest = parse_nbest(model, tokens, 3)
        assert [r.cost for r in nbest] == pytest.approx(by_yield[tokens][:3]), tokens

    words = model.vocabulary.words()
    for length in range(1, 3):
        for tokens in itertools.product(words, repeat=length):
            if tokens not in by_yield:
                assert parse(model, tokens) == NoParse("no-derivation"), tokens


@pytest.mark.parametrize("tokens", [("w1", "w2", "w2"), ("w2", "w2", "w2"), ("w1", "w1", "w2", "w2")])
def test_every_input_of_a_random_model_is_parsed_exactly(tokens):
    model = random_acceptor_model(np.random.default_rng(2))
    costs = _oracle(model).get(tokens)
    result = parse(model, tokens)
    if costs is None:
        assert result == NoParse("no-derivation")
    else:
        assert result.cost == pytest.approx(costs[0])
        assert [r.cost for r in parse_nbest(model, tokens, 1)] == pytest.approx([result.cost])


def test_chart_grows_polynomially():
    model = chain_model()
    stats = [chart_stats(model, ["a"] * n) for n in (4, 8, 16, 32)]
    for small, large in zip(stats, stats[1:]):
        assert large.nodes / small.nodes < 8
        assert large.edges / small.edges <= 17


def _in_cfg(tokens):
    """S -> a S b S | c"""
    @lru_cache(maxsize=None)
    def derives(i, j):
        if j - i == 1:
            return tokens[i] == "c"
        if tokens[i] != "a":
            return False
        return any(derives(i + 1, k) and tokens[k] == "b" and derives(k + 1, j) for k in range(i + 2, j - 1))

    return derives(0, len(tokens))


def test_word_cascade_recognizes_its_grammar():
    model = cfg_cascade()
    accepted = 0
    for length in range(1, 9):
        for tokens in itertools.product("abc", repeat=length):
            parsed = isinstance(parse(model, tokens), ParseResult)
            assert parsed == _in_cfg(tokens), tokens
            accepted += parsed
    assert accepted == 1 + 1 + 2
