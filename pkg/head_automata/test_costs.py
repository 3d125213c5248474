import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from head_automata.costs import cost_sum, from_cost, log_add, round12, to_cost
from head_automata.errors import CostDomainError


def test_certain_event_costs_nothing():
    assert to_cost(1.0) == 0.0
    assert from_cost(0.0) == 1.0


def test_cost_is_negated_natural_log():
    assert to_cost(0.5) == pytest.approx(math.log(2))
    assert from_cost(to_cost(0.2)) == pytest.approx(0.2)


@pytest.mark.parametrize("p", [0.0, -0.1])
def test_non_positive_probability_has_no_cost(p):
    with pytest.raises(CostDomainError):
        to_cost(p)


def test_cost_sum_adds_probabilities():
    assert cost_sum([to_cost(0.25), to_cost(0.5)]) == pytest.approx(to_cost(0.75))
    assert cost_sum([]) is None


def test_log_add():
    assert log_add(math.log(0.1), math.log(0.3)) == pytest.approx(math.log(0.4))


def test_round12_keeps_twelve_significant_digits():
    assert round12(1 / 3) == 0.333333333333
    assert round12(0.0) == 0.0
    assert round12(123456.7890123456) == 123456.789012


probabilities = st.floats(min_value=1e-300, max_value=1.0)
costs = st.floats(min_value=0.0, max_value=50.0)


@given(st.lists(probabilities, min_size=2, max_size=20))
def test_cost_order_is_probability_order_reversed(ps):
    cs = [to_cost(p) for p in ps]
    for (p, c), (q, d) in itertools.combinations(zip(ps, cs), 2):
        if p > q:
            assert c <= d
        if p < q:
            assert c >= d
        if c < d:
            assert p > q
        if c > d:
            assert p < q


@given(costs, costs)
def test_costs_add_where_probabilities_multiply(a, b):
    assert from_cost(a) * from_cost(b) == pytest.approx(from_cost(a + b), rel=1e-12)


def test_product_of_two_events():
    assert to_cost(0.5) + to_cost(0.2) == pytest.approx(to_cost(0.1))
