"""Session orchestration: lobby, training, two four-task blocks, one role switch.

Condition order per block comes from a balanced 4x4 Latin square indexed by
the participant-pair id, with the second block reversing the first, so every
condition appears exactly once per block and carryover is counterbalanced.
Each of the eight tasks gets a distinct puzzle; the training task has its own
reserved puzzle.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

from ..errors import NegspaceError
from ..geometry import MP, MW, RL, SS, ConditionSpec, Role
from ..tasks import TRAINING_SEED


class IllegalTransition(NegspaceError):
    pass


NAMED_CONDITIONS = (RL, SS, MP, MW)

# Williams design for n=4: every condition once per row and column, and every
# ordered pair of conditions appears exactly once across rows.
_LATIN_SQUARE = ((0, 1, 3, 2), (1, 2, 0, 3), (2, 3, 1, 0), (3, 0, 2, 1))


def condition_order_for_pair(pair_id: int) -> Tuple[ConditionSpec, ...]:
    """Eight-entry order: block one from the Latin square, block two reversed."""
    row = _LATIN_SQUARE[pair_id % 4]
    block1 = tuple(NAMED_CONDITIONS[i] for i in row)
    return block1 + tuple(reversed(block1))


class Phase(Enum):
    LOBBY = "lobby"
    TRAINING = "training"
    TASK = "task"
    ROLE_SWITCH = "role_switch"
    DONE = "done"


@dataclass(frozen=True)
class SessionEventMsg:
    pass


@dataclass(frozen=True)
class JoinEvent(SessionEventMsg):
    participant: int


@dataclass(frozen=True)
class TrainingDoneEvent(SessionEventMsg):
    pass


@dataclass(frozen=True)
class TaskCompleteEvent(SessionEventMsg):
    pass


@dataclass(frozen=True)
class ResumeEvent(SessionEventMsg):
    """Both participants ready again after switching roles."""


@dataclass(frozen=True)
class SessionState:
    phase: Phase
    roles: Tuple[Tuple[int, Role], Tuple[int, Role]]
    condition_order: Tuple[ConditionSpec, ...]   # 8 entries, one per task
    puzzle_ids: Tuple[int, ...]                  # 8 distinct ids
    training_puzzle_id: int = TRAINING_SEED
    task_index: int = 0                          # 1..8 while phase is TASK
    joined: Tuple[int, ...] = ()
    completions: int = 0
    role_switches: int = 0

    def __post_init__(self):
        if len(self.condition_order) != 8:
            raise ValueError("a session runs exactly 8 tasks")
        for block in (self.condition_order[:4], self.condition_order[4:]):
            if len(set(block)) != 4:
                raise ValueError("each condition must appear exactly once per block")
        if len(set(self.puzzle_ids)) != 8:
            raise ValueError("the eight puzzles must be distinct")
        if self.training_puzzle_id in self.puzzle_ids:
            raise ValueError("the training puzzle must not reappear as a task puzzle")

    def role_of(self, participant: int) -> Role:
        for pid, role in self.roles:
            if pid == participant:
                return role
        raise KeyError(f"unknown participant {participant}")

    def participant_with(self, role: Role) -> int:
        for pid, r in self.roles:
            if r is role:
                return pid
        raise KeyError(f"no participant holds {role}")

    @property
    def current_condition(self) -> ConditionSpec:
        if self.phase is Phase.TRAINING:
            return self.condition_order[0]
        if self.phase is not Phase.TASK:
            raise IllegalTransition(f"no active task in phase {self.phase}")
        return self.condition_order[self.task_index - 1]

    @property
    def current_puzzle_id(self) -> int:
        if self.phase is Phase.TRAINING:
            return self.training_puzzle_id
        if self.phase is not Phase.TASK:
            raise IllegalTransition(f"no active task in phase {self.phase}")
        return self.puzzle_ids[self.task_index - 1]


def new_session(pair_id: int, puzzle_ids: Tuple[int, ...],
                first_instructor: int = 0,
                training_puzzle_id: int = TRAINING_SEED) -> SessionState:
    other = 1 - first_instructor
    return SessionState(
        phase=Phase.LOBBY,
        roles=((first_instructor, Role.INSTRUCTOR), (other, Role.ASSEMBLER)),
        condition_order=condition_order_for_pair(pair_id),
        puzzle_ids=tuple(puzzle_ids),
        training_puzzle_id=training_puzzle_id,
    )


def session_step(state: SessionState, event: SessionEventMsg) -> SessionState:
    """Advance the session machine or raise IllegalTransition."""
    if state.phase is Phase.LOBBY and isinstance(event, JoinEvent):
        if event.participant not in (0, 1):
            raise IllegalTransition(f"unknown participant {event.participant}")
        if event.participant in state.joined:
            raise IllegalTransition(f"participant {event.participant} already joined")
        joined = state.joined + (event.participant,)
        phase = Phase.TRAINING if len(joined) == 2 else Phase.LOBBY
        return replace(state, joined=joined, phase=phase)

    if state.phase is Phase.TRAINING and isinstance(event, TrainingDoneEvent):
        return replace(state, phase=Phase.TASK, task_index=1)

    if state.phase is Phase.TASK and isinstance(event, TaskCompleteEvent):
        completions = state.completions + 1
        if state.task_index == 8:
            return replace(state, phase=Phase.DONE, completions=completions)
        if state.task_index == 4:
            swapped = tuple((pid, role.other) for pid, role in state.roles)
            return replace(state, phase=Phase.ROLE_SWITCH, roles=swapped,
                           completions=completions, role_switches=state.role_switches + 1)
        return replace(state, task_index=state.task_index + 1, completions=completions)

    if state.phase is Phase.ROLE_SWITCH and isinstance(event, ResumeEvent):
        return replace(state, phase=Phase.TASK, task_index=5)

    raise IllegalTransition(f"{type(event).__name__} is illegal in phase {state.phase.value}")
