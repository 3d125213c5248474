"""
Cost arithmetic.

A cost is a negated natural-log probability. Costs add where probabilities
multiply, and a lower cost is a more probable event. Impossible events have
no cost at all: callers represent them with ``None``.
"""

import math
from typing import Iterable, Optional

import numpy as np
from scipy.special import logsumexp

from .errors import CostDomainError

Cost = float

# Default absolute tolerance for distribution normalization checks
TOLERANCE = 1e-9


def to_cost(p: float) -> Cost:
    if not p > 0.0:
        raise CostDomainError(f"cannot take the cost of probability {p!r}; use an explicit impossible marker")
    if p == 1.0:
        return 0.0
    return -math.log(p)


def from_cost(c: Cost) -> float:
    return math.exp(-c)


def log_add(a: float, b: float) -> float:
    """Add two probabilities given as natural-log values."""
    return float(np.logaddexp(a, b))


def cost_sum(costs: Iterable[Cost]) -> Optional[Cost]:
    """
    Cost of the summed probability of several events.

    Args:
        costs: costs of mutually exclusive events

    Returns:
        Cost of their union, or None when there are no events.
    """
    values = [-c for c in costs]
    if not values:
        return None
    return float(-logsumexp(values))


def round12(value: float) -> float:
    """Round to 12 significant digits for stable serialized output."""
    if value == 0.0 or not math.isfinite(value):
        return value
    return float(f"{value:.12g}")
