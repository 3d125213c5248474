"""
Ordered dependency trees.

Children are stored in the order their transitions wrote them. Left children
are therefore already in surface order, while right children are stored
outermost first: the first right transition writes the dependent that ends
up rightmost.
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterator, Optional, Tuple

from .errors import InputFormatError
from .symbols import EPSILON

_TREE_KEYS = {"label", "relation", "automaton", "initial_state", "trace", "left", "right"}


@dataclass(frozen=True)
class OrderedDependencyTree:
    label: str
    relation: Optional[str]
    automaton: str
    initial_state: int
    trace: Tuple[int, ...]
    left: Tuple["OrderedDependencyTree", ...] = ()
    right: Tuple["OrderedDependencyTree", ...] = ()

    @property
    def is_root(self) -> bool:
        return self.relation is None

    def depth(self) -> int:
        children = self.left + self.right
        if not children:
            return 1
        return 1 + max(child.depth() for child in children)

    def size(self) -> int:
        return 1 + sum(child.size() for child in self.left + self.right)

    def nodes(self) -> Iterator["OrderedDependencyTree"]:
        yield self
        for child in self.left + self.right:
            yield from child.nodes()

    def to_json(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "relation": self.relation,
            "automaton": self.automaton,
            "initial_state": self.initial_state,
            "trace": list(self.trace),
            "left": [child.to_json() for child in self.left],
            "right": [child.to_json() for child in self.right],
        }


def tree_from_json(obj: Any, path: Optional[str] = None, line: Optional[int] = None) -> OrderedDependencyTree:
    def fail(reason: str) -> InputFormatError:
        return InputFormatError(reason, path=path, line=line)

    def build(node: Any, where: str) -> OrderedDependencyTree:
        if not isinstance(node, dict):
            raise fail(f"{where}: tree node must be an object")
        unknown = set(node) - _TREE_KEYS
        if unknown:
            raise fail(f"{where}: unknown key(s) {', '.join(sorted(unknown))}")
        missing = _TREE_KEYS - set(node)
        if missing:
            raise fail(f"{where}: missing key(s) {', '.join(sorted(missing))}")
        if not isinstance(node["label"], str) or not isinstance(node["automaton"], str):
            raise fail(f"{where}: label and automaton must be strings")
        if node["relation"] is not None and not isinstance(node["relation"], str):
            raise fail(f"{where}: relation must be a string or null")
        if not isinstance(node["initial_state"], int) or isinstance(node["initial_state"], bool):
            raise fail(f"{where}: initial_state must be an integer")
        trace = node["trace"]
        if not isinstance(trace, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in trace):
            raise fail(f"{where}: trace must be an array of action indices")
        for side in ("left", "right"):
            if not isinstance(node[side], list):
                raise fail(f"{where}: {side} must be an array")
        return OrderedDependencyTree(
            label=node["label"],
            relation=node["relation"],
            automaton=node["automaton"],
            initial_state=node["initial_state"],
            trace=tuple(trace),
            left=tuple(build(c, f"{where}.left[{i}]") for i, c in enumerate(node["left"])),
            right=tuple(build(c, f"{where}.right[{i}]") for i, c in enumerate(node["right"])),
        )

    return build(obj, "tree")


def tree_to_string(tree: OrderedDependencyTree) -> Tuple[str, ...]:
    """Left-parent-right traversal; ε-labeled nodes contribute no token."""
    tokens = []
    for child in tree.left:
        tokens.extend(tree_to_string(child))
    if tree.label != EPSILON:
        tokens.append(tree.label)
    for child in reversed(tree.right):
        tokens.extend(tree_to_string(child))
    return tuple(tokens)
