"""
Head transducers.

A head transducer reads the pair (L1, R1) of source dependents of a word w
and writes the pair (L2, R2) of target dependents of a word v. Every
transition carries one source symbol and one target symbol (either may be ε)
and a valency per side saying which sequence it reads or writes.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

from .symbols import EPSILON


class Valency(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class TransducerActionKind(str, Enum):
    TRANSITION = "transition"
    STOP = "stop"


@dataclass(frozen=True)
class TransducerAction:
    kind: TransducerActionKind
    source_symbol: Optional[str]
    target_symbol: Optional[str]
    source_valency: Optional[Valency]
    target_valency: Optional[Valency]
    next_state: Optional[int]
    probability: float

    @classmethod
    def transition(cls, source_symbol: str, target_symbol: str, source_valency: Valency,
                   target_valency: Valency, next_state: int, probability: float) -> "TransducerAction":
        return cls(TransducerActionKind.TRANSITION, source_symbol, target_symbol,
                   Valency(source_valency), Valency(target_valency), next_state, probability)

    @classmethod
    def stop(cls, probability: float) -> "TransducerAction":
        return cls(TransducerActionKind.STOP, None, None, None, None, None, probability)

    @property
    def is_stop(self) -> bool:
        return self.kind is TransducerActionKind.STOP

    @property
    def epsilon_source(self) -> bool:
        return self.source_symbol == EPSILON

    @property
    def epsilon_target(self) -> bool:
        return self.target_symbol == EPSILON


@dataclass(frozen=True)
class HeadTransducer:
    id: str
    states: Tuple[Tuple[TransducerAction, ...], ...]
    initial_state: int = 0

    @classmethod
    def build(cls, id: str, states: Sequence[Iterable[TransducerAction]], initial_state: int = 0) -> "HeadTransducer":
        return cls(id, tuple(tuple(actions) for actions in states), initial_state)

    @property
    def state_count(self) -> int:
        return len(self.states)

    def actions(self, state: int) -> Tuple[TransducerAction, ...]:
        return self.states[state]

    def transitions(self) -> Iterable[Tuple[int, int, TransducerAction]]:
        for q, actions in enumerate(self.states):
            for index, action in enumerate(actions):
                if not action.is_stop:
                    yield q, index, action

    def has_epsilon_source(self) -> bool:
        return any(a.epsilon_source for _, _, a in self.transitions())
