"""
Symbols, vocabularies and relation sets.

Symbols are plain strings. The empty word ε is the reserved string ``<eps>``
both in memory and in every file format.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Tuple

from .errors import ModelFormatError

Symbol = str
EPSILON: Symbol = "<eps>"


def is_epsilon(symbol: Symbol) -> bool:
    return symbol == EPSILON


@dataclass(frozen=True)
class Vocabulary:
    symbols: Tuple[Symbol, ...]
    includes_epsilon: bool = False
    _index: Dict[Symbol, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index: Dict[Symbol, int] = {}
        for symbol in self.symbols:
            if not isinstance(symbol, str) or symbol == "":
                raise ModelFormatError(f"invalid symbol {symbol!r}", location="vocab")
            if symbol in index:
                raise ModelFormatError(f"duplicate symbol {symbol!r}", location="vocab")
            index[symbol] = len(index)
        if (EPSILON in index) != self.includes_epsilon:
            raise ModelFormatError("epsilon must be listed exactly when the vocabulary includes it", location="vocab")
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_symbols(cls, symbols: Iterable[Symbol], with_epsilon: bool = False) -> "Vocabulary":
        ordered = [s for s in symbols if s != EPSILON]
        if with_epsilon:
            ordered.append(EPSILON)
        return cls(tuple(ordered), includes_epsilon=with_epsilon)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._index

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, symbol: Symbol) -> int:
        return self._index[symbol]

    def words(self) -> Tuple[Symbol, ...]:
        """Symbols without ε."""
        return tuple(s for s in self.symbols if s != EPSILON)


@dataclass(frozen=True)
class RelationSet:
    relations: Tuple[str, ...]
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index: Dict[str, int] = {}
        for relation in self.relations:
            if not isinstance(relation, str) or relation == "":
                raise ModelFormatError(f"invalid relation {relation!r}", location="relations")
            if relation in index:
                raise ModelFormatError(f"duplicate relation {relation!r}", location="relations")
            index[relation] = len(index)
        object.__setattr__(self, "_index", index)

    def __contains__(self, relation: object) -> bool:
        return relation in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self.relations)

    def __len__(self) -> int:
        return len(self.relations)

    def index(self, relation: str) -> int:
        return self._index[relation]
