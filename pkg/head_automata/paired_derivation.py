"""
Paired derivations produced by recursive head transduction.

Each node aligns a source word w with a target word v and records the
transducer run that wrote both dependent sequences. Children are kept in the
order the run wrote them, together with the valencies of the transition
that wrote them, so the source tree S and the target tree T are both views
over the same nodes.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from .costs import Cost
from .errors import InputFormatError
from .symbols import EPSILON
from .transducer import Valency
from .trees import OrderedDependencyTree


@dataclass(frozen=True)
class PairedNode:
    source_label: str
    target_label: str
    transducer: str
    trace: Tuple[int, ...]
    children: Tuple["PairedNode", ...] = ()
    source_valency: Optional[Valency] = None
    target_valency: Optional[Valency] = None

    def size(self) -> int:
        return 1 + sum(child.size() for child in self.children)

    def nodes(self):
        yield self
        for child in self.children:
            yield from child.nodes()

    def _side_children(self, side: str) -> Tuple[List["PairedNode"], List["PairedNode"]]:
        left, right = [], []
        for child in self.children:
            label = child.source_label if side == "source" else child.target_label
            if label == EPSILON:
                continue
            valency = child.source_valency if side == "source" else child.target_valency
            (left if valency is Valency.LEFT else right).append(child)
        return left, right

    def side_yield(self, side: str) -> Tuple[str, ...]:
        left, right = self._side_children(side)
        label = self.source_label if side == "source" else self.target_label
        tokens: List[str] = []
        for child in left:
            tokens.extend(child.side_yield(side))
        if label != EPSILON:
            tokens.append(label)
        for child in reversed(right):
            tokens.extend(child.side_yield(side))
        return tuple(tokens)

    def side_tree(self, side: str, relation: Optional[str] = None) -> OrderedDependencyTree:
        left, right = self._side_children(side)
        label = self.source_label if side == "source" else self.target_label
        return OrderedDependencyTree(
            label=label,
            relation=relation,
            automaton=self.transducer,
            initial_state=0,
            trace=self.trace,
            left=tuple(c.side_tree(side, c.source_label if side == "source" else c.target_label) for c in left),
            right=tuple(c.side_tree(side, c.source_label if side == "source" else c.target_label) for c in right),
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "source_label": self.source_label,
            "target_label": self.target_label,
            "transducer": self.transducer,
            "trace": list(self.trace),
            "source_valency": self.source_valency.value if self.source_valency else None,
            "target_valency": self.target_valency.value if self.target_valency else None,
            "children": [child.to_json() for child in self.children],
        }


@dataclass(frozen=True)
class PairedDerivation:
    root: PairedNode

    def source_yield(self) -> Tuple[str, ...]:
        return self.root.side_yield("source")

    def target_yield(self) -> Tuple[str, ...]:
        return self.root.side_yield("target")

    def source_tree(self) -> OrderedDependencyTree:
        """S as an ordered tree; arcs carry the dependent word, ε-sourced subtrees are left out."""
        return self.root.side_tree("source")

    def target_tree(self) -> OrderedDependencyTree:
        return self.root.side_tree("target")

    def size(self) -> int:
        return self.root.size()

    def epsilon_source_nodes(self) -> int:
        return sum(1 for node in self.root.nodes() if node.source_label == EPSILON)

    def to_json(self) -> Dict[str, Any]:
        return self.root.to_json()


def paired_node_from_json(obj: Any, path: Optional[str] = None, line: Optional[int] = None) -> PairedNode:
    keys = {"source_label", "target_label", "transducer", "trace", "source_valency", "target_valency", "children"}
    if not isinstance(obj, dict) or set(obj) != keys:
        raise InputFormatError("paired node needs exactly the keys " + ", ".join(sorted(keys)), path, line)
    try:
        return PairedNode(
            source_label=str(obj["source_label"]),
            target_label=str(obj["target_label"]),
            transducer=str(obj["transducer"]),
            trace=tuple(int(i) for i in obj["trace"]),
            children=tuple(paired_node_from_json(c, path, line) for c in obj["children"]),
            source_valency=Valency(obj["source_valency"]) if obj["source_valency"] else None,
            target_valency=Valency(obj["target_valency"]) if obj["target_valency"] else None,
        )
    except InputFormatError:
        raise
    except (TypeError, ValueError) as e:
        raise InputFormatError(f"malformed paired node: {e}", path, line)


@dataclass(frozen=True)
class TransductionResult:
    target: Tuple[str, ...]
    cost: Cost
    derivation: PairedDerivation

    def to_json(self) -> Dict[str, Any]:
        return {"target": list(self.target), "cost": self.cost, "derivation": self.derivation.to_json()}


@dataclass(frozen=True)
class NoTranslation:
    reason: str
    tokens: Tuple[str, ...] = ()

    def to_json(self) -> Dict[str, Any]:
        return {"target": None, "cost": None, "derivation": None, "reason": self.reason, "tokens": list(self.tokens)}
