"""
Membership of a token string in the language of one simple head acceptor.

The string of a run is L·R, the head itself excluded. A left transition
consumes the next unread token from the left end of the string and a right
transition the next unread token from the right end, so a run is a path over
(unread span, state) that stops only once the span is empty.
"""

import logging
from functools import lru_cache
from typing import Optional, Sequence

from .acceptor import ActionKind, HeadAcceptor
from .costs import Cost, to_cost

logger = logging.getLogger(__name__)


def accepts(a: HeadAcceptor, tokens: Sequence[str], from_state: Optional[int] = None) -> Optional[Cost]:
    """
    Best cost of a run of ``a`` writing exactly ``tokens``.

    Args:
        a: word-alphabet head acceptor
        tokens: the string L·R
        from_state: start state, the acceptor's default initial state if omitted

    Returns:
        Minimum cost over all runs, or None when no run writes the string.
    """
    s = tuple(tokens)
    start = a.default_initial if from_state is None else from_state

    @lru_cache(maxsize=None)
    def best(i: int, j: int, q: int) -> Optional[Cost]:
        result = None
        for action in a.actions(q):
            if action.probability <= 0.0:
                continue
            if action.is_stop:
                if i != j:
                    continue
                rest = 0.0
            elif i == j:
                continue
            elif action.kind is ActionKind.LEFT:
                if s[i] != action.symbol:
                    continue
                rest = best(i + 1, j, action.next_state)
            else:
                if s[j - 1] != action.symbol:
                    continue
                rest = best(i, j - 1, action.next_state)
            if rest is None:
                continue
            cost = rest + to_cost(action.probability)
            if result is None or cost < result:
                result = cost
        return result

    cost = best(0, len(s), start)
    logger.debug("accepts %s on %d tokens: %s", a.id, len(s), cost)
    return cost
