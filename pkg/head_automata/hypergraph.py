"""
Derivation forests shared by the parser, the transduction engine and training.

A chart is built top-down from a goal item: each item lists its ways of being
derived as hyperedges whose tails are smaller items. Items are added only
after all their tails, so node ids are a topological order and every pass
below is a single sweep over ids. Items with no complete derivation are never
added.

Edge costs are negated log probabilities. Viterbi and k-best work in cost
space; inside and outside accumulate log probabilities with logsumexp.
"""

import heapq
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.special import logsumexp

from .costs import Cost

logger = logging.getLogger(__name__)

# Cost differences below this are summation noise, not a preference
TIE_TOLERANCE = 1e-11


class Edge(NamedTuple):
    head: int
    tails: Tuple[int, ...]
    cost: Cost
    label: Hashable


# (tail keys, cost, label) as produced by an item expander
EdgeSpec = Tuple[Sequence[Hashable], Cost, Hashable]


@dataclass(frozen=True)
class Derivation:
    label: Hashable
    children: Tuple["Derivation", ...]
    cost: Cost


@dataclass(frozen=True)
class ChartStats:
    nodes: int
    edges: int


@dataclass
class Hypergraph:
    keys: List[Hashable] = field(default_factory=list)
    edges: List[Edge] = field(default_factory=list)
    incoming: List[List[int]] = field(default_factory=list)
    root: Optional[int] = None

    def add_node(self, key: Hashable) -> int:
        self.keys.append(key)
        self.incoming.append([])
        return len(self.keys) - 1

    def add_edge(self, head: int, tails: Tuple[int, ...], cost: Cost, label: Hashable) -> int:
        self.edges.append(Edge(head, tails, cost, label))
        self.incoming[head].append(len(self.edges) - 1)
        return len(self.edges) - 1

    @property
    def stats(self) -> ChartStats:
        return ChartStats(len(self.keys), len(self.edges))

    @classmethod
    def build(cls, goal: Hashable, expand: Callable[[Hashable], Iterable[EdgeSpec]]) -> "Hypergraph":
        """
        Build the forest below ``goal``.

        ``expand(key)`` lists the edges deriving an item as (tail keys, cost,
        label). Items reachable from ``goal`` must form an acyclic graph.
        The result has ``root`` None when the goal is not derivable.
        """
        graph = cls()
        memo: Dict[Hashable, Optional[int]] = {}

        def visit(key: Hashable) -> Optional[int]:
            if key in memo:
                return memo[key]
            resolved = []
            for tail_keys, cost, label in expand(key):
                tails = []
                for tail_key in tail_keys:
                    tail = visit(tail_key)
                    if tail is None:
                        break
                    tails.append(tail)
                else:
                    resolved.append((tuple(tails), cost, label))
            if not resolved:
                memo[key] = None
                return None
            node = graph.add_node(key)
            for tails, cost, label in resolved:
                graph.add_edge(node, tails, cost, label)
            memo[key] = node
            return node

        graph.root = visit(goal)
        logger.debug("chart: %d nodes, %d edges, %d items visited", len(graph.keys), len(graph.edges), len(memo))
        return graph

    # Cost-space search

    def viterbi_costs(self) -> Tuple[List[Optional[Cost]], List[Optional[int]]]:
        """
        Best cost and best incoming edge of every node.

        Costs within TIE_TOLERANCE of each other are ties and keep the edge
        listed first, so the winner is the derivation whose preorder sequence
        of incoming-edge positions is least.
        """
        best: List[Optional[Cost]] = [None] * len(self.keys)
        back: List[Optional[int]] = [None] * len(self.keys)
        for node in range(len(self.keys)):
            for edge_id in self.incoming[node]:
                edge = self.edges[edge_id]
                cost = edge.cost
                for tail in edge.tails:
                    if best[tail] is None:
                        cost = None
                        break
                    cost += best[tail]
                if cost is not None and (best[node] is None or cost < best[node] - TIE_TOLERANCE):
                    best[node] = cost
                    back[node] = edge_id
        return best, back

    def viterbi(self) -> Optional[Derivation]:
        if self.root is None:
            return None
        best, back = self.viterbi_costs()
        if best[self.root] is None:
            return None

        def unfold(node: int) -> Derivation:
            edge = self.edges[back[node]]
            return Derivation(edge.label, tuple(unfold(t) for t in edge.tails), best[node])

        return unfold(self.root)

    def kbest(self, k: int) -> List[Derivation]:
        """
        The ``k`` cheapest derivations of the root, cheapest first.

        Each node keeps its own sorted list of derivations, computed bottom-up
        by a frontier search over (edge, tail ranks). Ties are broken by edge
        insertion order and then by rank vector.
        """
        if self.root is None or k < 1:
            return []
        # per node: list of (cost, edge id, tail ranks)
        lists: List[List[Tuple[Cost, int, Tuple[int, ...]]]] = [[] for _ in self.keys]
        for node in range(self.root + 1):
            heap: List[Tuple[Cost, int, Tuple[int, ...]]] = []
            seen: Set[Tuple[int, Tuple[int, ...]]] = set()

            def push(edge_id: int, ranks: Tuple[int, ...]) -> None:
                edge = self.edges[edge_id]
                if (edge_id, ranks) in seen:
                    return
                cost = edge.cost
                for tail, rank in zip(edge.tails, ranks):
                    if rank >= len(lists[tail]):
                        return
                    cost += lists[tail][rank][0]
                seen.add((edge_id, ranks))
                heapq.heappush(heap, (cost, edge_id, ranks))

            for edge_id in self.incoming[node]:
                push(edge_id, (0,) * len(self.edges[edge_id].tails))
            out = lists[node]
            while heap and len(out) < k:
                cost, edge_id, ranks = heapq.heappop(heap)
                out.append((cost, edge_id, ranks))
                for i in range(len(ranks)):
                    push(edge_id, ranks[:i] + (ranks[i] + 1,) + ranks[i + 1:])

        def unfold(node: int, rank: int) -> Derivation:
            cost, edge_id, ranks = lists[node][rank]
            edge = self.edges[edge_id]
            return Derivation(edge.label, tuple(unfold(t, r) for t, r in zip(edge.tails, ranks)), cost)

        return [unfold(self.root, rank) for rank in range(len(lists[self.root]))]

    # Probability-space sums

    def inside(self) -> np.ndarray:
        """Log inside probability of every node."""
        beta = np.full(len(self.keys), -np.inf)
        for node in range(len(self.keys)):
            terms = [-self.edges[e].cost + sum(beta[t] for t in self.edges[e].tails) for e in self.incoming[node]]
            beta[node] = logsumexp(terms) if terms else -np.inf
        return beta

    def outside(self, beta: np.ndarray) -> np.ndarray:
        """Log outside probability of every node, given the inside values."""
        alpha = np.full(len(self.keys), -np.inf)
        if self.root is None:
            return alpha
        contributions: List[List[float]] = [[] for _ in self.keys]
        contributions[self.root].append(0.0)
        for node in range(len(self.keys) - 1, -1, -1):
            if contributions[node]:
                alpha[node] = logsumexp(contributions[node])
            if alpha[node] == -np.inf:
                continue
            for edge_id in self.incoming[node]:
                edge = self.edges[edge_id]
                total = alpha[node] - edge.cost + sum(beta[t] for t in edge.tails)
                for tail in edge.tails:
                    contributions[tail].append(total - beta[tail])
        return alpha

    def edge_posteriors(self) -> Tuple[Optional[float], List[float]]:
        """
        Log inside probability of the root and the posterior of every edge.

        Returns (None, zeros) when the root has no mass.
        """
        if self.root is None:
            return None, [0.0] * len(self.edges)
        beta = self.inside()
        z = float(beta[self.root])
        if z == -np.inf:
            return None, [0.0] * len(self.edges)
        alpha = self.outside(beta)
        posteriors = []
        for edge in self.edges:
            if alpha[edge.head] == -np.inf:
                posteriors.append(0.0)
                continue
            log_p = alpha[edge.head] - edge.cost + sum(beta[t] for t in edge.tails) - z
            posteriors.append(float(np.exp(log_p)))
        return z, posteriors
