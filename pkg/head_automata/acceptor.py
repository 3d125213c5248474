"""
Head acceptors.

A head acceptor writes a pair of sequences (L, R). A left transition writes
its symbol to the right end of L, a right transition writes its symbol to the
left end of R, and a stop action completes both sequences. Symbols are words
for simple acceptors and relation labels for relational acceptors.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple


class ActionKind(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    STOP = "stop"


class AlphabetKind(str, Enum):
    WORD = "word"
    RELATION = "relation"


@dataclass(frozen=True)
class AcceptorAction:
    kind: ActionKind
    symbol: Optional[str]
    next_state: Optional[int]
    probability: float

    @classmethod
    def left(cls, symbol: str, next_state: int, probability: float) -> "AcceptorAction":
        return cls(ActionKind.LEFT, symbol, next_state, probability)

    @classmethod
    def right(cls, symbol: str, next_state: int, probability: float) -> "AcceptorAction":
        return cls(ActionKind.RIGHT, symbol, next_state, probability)

    @classmethod
    def stop(cls, probability: float) -> "AcceptorAction":
        return cls(ActionKind.STOP, None, None, probability)

    @property
    def is_stop(self) -> bool:
        return self.kind is ActionKind.STOP


@dataclass(frozen=True)
class HeadAcceptor:
    id: str
    alphabet_kind: AlphabetKind
    states: Tuple[Tuple[AcceptorAction, ...], ...]
    default_initial: int = 0

    @classmethod
    def build(cls, id: str, states: Sequence[Iterable[AcceptorAction]],
              alphabet_kind: AlphabetKind = AlphabetKind.RELATION, default_initial: int = 0) -> "HeadAcceptor":
        return cls(id, AlphabetKind(alphabet_kind), tuple(tuple(actions) for actions in states), default_initial)

    @property
    def state_count(self) -> int:
        return len(self.states)

    def actions(self, state: int) -> Tuple[AcceptorAction, ...]:
        return self.states[state]

    def stop_probability(self, state: int) -> float:
        return sum(a.probability for a in self.states[state] if a.is_stop)

    def emitted_symbols(self, state: int) -> Tuple[str, ...]:
        """Symbols of positive transitions reachable from ``state``, in index order."""
        seen = [state]
        frontier = [state]
        symbols = []
        while frontier:
            q = frontier.pop()
            for action in self.states[q]:
                if action.is_stop:
                    continue
                if action.symbol not in symbols:
                    symbols.append(action.symbol)
                nxt = action.next_state
                if nxt is not None and 0 <= nxt < self.state_count and nxt not in seen:
                    seen.append(nxt)
                    frontier.append(nxt)
        return tuple(symbols)
