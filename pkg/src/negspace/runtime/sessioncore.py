"""Transport-agnostic session authority.

One SessionCore instance owns the session state machine, the authoritative
board, puzzle judging, and the event log; the simulator and the live server
both drive it with decoded messages and collect the messages it wants sent.
All mutations happen on the caller's single thread of control.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .. import board as board_ops
from ..board import BoardSpec, BoardState
from ..errors import NegspaceError
from ..geometry import Role, quat_rotate, raycast, POINTER_FORWARD
from ..protocol import (
    ButtonEvent,
    CubeMove,
    Highlight,
    Join,
    JoinEvent,
    NO_CUBE,
    Phase,
    PoseSample,
    PoseStream,
    ResumeEvent,
    RoleAssign,
    SeqCounter,
    SessionState,
    StateDelta,
    TaskCompleteEvent,
    TaskComplete,
    TaskStart,
    TrainingDoneEvent,
    apply_delta,
    delta_deselect,
    delta_drop,
    delta_pick,
    delta_select,
    session_step,
    snapshot_of,
)
from ..tasks import (
    EventKind,
    PuzzleSpec,
    RuleSet,
    SessionEvent,
    Verdict,
    generate_puzzle,
    judge_event,
)


class SessionFull(NegspaceError):
    pass


@dataclass
class Outgoing:
    recipient: int  # participant id
    message: object


class SessionCore:
    """Authoritative session owner; emits messages via a pluggable sender."""

    def __init__(self, session: SessionState, board_spec: BoardSpec,
                 rules: RuleSet = RuleSet(), now: Callable[[], float] = None,
                 send: Callable[[int, object], None] = None,
                 on_reject: Callable[[int, str], None] = None):
        self.session = session
        self.board_spec = board_spec
        self.rules = rules
        self.now = now if now is not None else (lambda: 0.0)
        self._send_fn = send
        self._on_reject = on_reject
        self.outbox: List[Outgoing] = []
        self.seq: Dict[int, SeqCounter] = {0: SeqCounter(), 1: SeqCounter()}
        self.board: Optional[BoardState] = None
        self.puzzle: Optional[PuzzleSpec] = None
        self.progress = 0
        # seq numbers are per sender, so each participant gets its own stream
        self.pose_streams: Dict[int, PoseStream] = {0: PoseStream(), 1: PoseStream()}
        self.task_log: List[SessionEvent] = []
        self.completed_logs: List[List[SessionEvent]] = []
        self.training_log: Optional[List[SessionEvent]] = None
        self._puzzles: Dict[int, PuzzleSpec] = {}
        self.hover_selects = 0

    # --- plumbing ---------------------------------------------------------

    def _emit(self, recipient: int, message) -> None:
        stamped = self.seq[recipient].stamp(message)
        if self._send_fn is not None:
            self._send_fn(recipient, stamped)
        else:
            self.outbox.append(Outgoing(recipient, stamped))

    def _broadcast(self, message) -> None:
        for pid in (0, 1):
            self._emit(pid, message)

    def drain(self) -> List[Outgoing]:
        out, self.outbox = self.outbox, []
        return out

    def _log(self, kind: EventKind, cube_id=None, cell=None, condition=None) -> None:
        self.task_log.append(SessionEvent(time_s=self.now(), kind=kind,
                                          cube_id=cube_id, cell=cell,
                                          condition=condition))

    def puzzle_by_id(self, puzzle_id: int) -> PuzzleSpec:
        if puzzle_id not in self._puzzles:
            self._puzzles[puzzle_id] = generate_puzzle(puzzle_id, self.board_spec,
                                                       self.rules)
        return self._puzzles[puzzle_id]

    @property
    def assembler(self) -> int:
        return self.session.participant_with(Role.ASSEMBLER)

    @property
    def instructor(self) -> int:
        return self.session.participant_with(Role.INSTRUCTOR)

    # --- joining and task flow ---------------------------------------------

    def on_join(self, pid: int, msg: Join) -> None:
        if self.session.phase is not Phase.LOBBY:
            if pid in self.session.joined:
                self._resync(pid)  # a rejoin is a resync request
                return
            raise SessionFull("session already has two participants")
        self.session = session_step(self.session, JoinEvent(pid))
        if self.session.phase is Phase.TRAINING:
            for p, role in self.session.roles:
                self._emit(p, RoleAssign(participant=p,
                                         role=0 if role is Role.INSTRUCTOR else 1))
            self._start_task()

    def _resync(self, pid: int) -> None:
        role = self.session.role_of(pid)
        self._emit(pid, RoleAssign(participant=pid,
                                   role=0 if role is Role.INSTRUCTOR else 1))
        if self.board is not None:
            self._emit(pid, self._task_start_msg(for_instructor=pid == self.instructor))
            self._emit(pid, snapshot_of(self.board))

    def _task_start_msg(self, for_instructor: bool) -> TaskStart:
        p = self.puzzle
        base = dict(task_index=self.session.task_index,
                    condition_code=self.session.current_condition.code,
                    puzzle_id=p.id)
        if not for_instructor:
            return TaskStart(**base)
        return TaskStart(**base,
                         initial=CubeMove(p.initial[0], *p.initial[1]),
                         starts=tuple(CubeMove(c, *cell) for c, cell in p.starts),
                         solution=tuple(CubeMove(s.cube_id, *s.target)
                                        for s in p.solution))

    def _start_task(self) -> None:
        self.puzzle = self.puzzle_by_id(self.session.current_puzzle_id)
        self.board = self.puzzle.initial_board_state(self.board_spec)
        self.progress = 0
        self.task_log = []
        cond = self.session.current_condition
        self._log(EventKind.TASK_START, condition=cond.name or cond.label)
        self._emit(self.instructor, self._task_start_msg(for_instructor=True))
        self._emit(self.assembler, self._task_start_msg(for_instructor=False))
        self._broadcast(snapshot_of(self.board))

    def _finish_task(self) -> None:
        self._log(EventKind.TASK_COMPLETE)
        was_training = self.session.phase is Phase.TRAINING
        if was_training:
            self.training_log = self.task_log
        else:
            self.completed_logs.append(self.task_log)
        self.task_log = []
        # fade-to-black signal for both participants
        self._broadcast(TaskComplete(task_index=self.session.task_index,
                                     timestamp_us=int(self.now() * 1e6)))
        if was_training:
            self.session = session_step(self.session, TrainingDoneEvent())
        else:
            self.session = session_step(self.session, TaskCompleteEvent())
            if self.session.phase is Phase.ROLE_SWITCH:
                for p, role in self.session.roles:
                    self._emit(p, RoleAssign(participant=p,
                                             role=0 if role is Role.INSTRUCTOR else 1))
                self.session = session_step(self.session, ResumeEvent())
        if self.session.phase is not Phase.DONE:
            self._start_task()
        else:
            self.board = None
            self.puzzle = None

    @property
    def done(self) -> bool:
        return self.session.phase is Phase.DONE

    # --- interaction (assembler only; the instructor never touches the board)

    def on_pose(self, pid: int, sample: PoseSample) -> None:
        self.pose_streams[pid].ingest(sample)
        if self.board is None or pid != self.assembler:
            return
        latest = self.pose_streams[pid].latest
        if latest is None or self.board.held is not None:
            return
        direction = quat_rotate(np.asarray(latest.orientation, float), POINTER_FORWARD)
        hit = raycast(np.asarray(latest.hand, float), direction,
                      self.board.scene_boxes())
        if hit is not None and hit.cube_id != self.board.selection:
            self._apply_and_replicate(delta_select(hit.cube_id))
            self._broadcast(Highlight(cube=hit.cube_id))
            self._log(EventKind.SELECT, cube_id=hit.cube_id)
            self.hover_selects += 1
        elif hit is None and self.board.selection is not None:
            self._apply_and_replicate(delta_deselect())
            self._broadcast(Highlight(cube=NO_CUBE))

    def on_button(self, pid: int, msg: ButtonEvent) -> None:
        if self.board is None or pid != self.assembler:
            return
        if self.board.held is not None:
            self._try_drop()
        elif self.board.selection is not None:
            self._do_pick()

    def _apply_and_replicate(self, delta: StateDelta) -> None:
        self.board = apply_delta(self.board, delta)
        self._broadcast(delta)

    def _do_pick(self) -> None:
        cube = self.board.selection
        self._apply_and_replicate(delta_pick(cube))
        self._log(EventKind.PICK, cube_id=cube)
        verdict = judge_event(self.puzzle, self.progress,
                              SessionEvent(self.now(), EventKind.SELECT, cube_id=cube))
        if verdict is Verdict.WRONG_SELECT:
            self._log(EventKind.WRONG_SELECT, cube_id=cube)

    def _try_drop(self) -> None:
        latest = self.pose_streams[self.assembler].latest
        if latest is None:
            return
        direction = quat_rotate(np.asarray(latest.orientation, float), POINTER_FORWARD)
        floor_y = self.board.spec.origin[1]
        origin = np.asarray(latest.hand, float)
        if abs(direction[1]) < 1e-12:
            return
        t = (floor_y - origin[1]) / direction[1]
        if t <= 0:
            return
        cell = self.board.spec.cell_at(origin + t * direction)
        if cell is None:
            return
        cube = self.board.held
        try:
            next_board = board_ops.drop(self.board, cell)
        except NegspaceError as exc:
            # rejected drop: cube stays in hand, nothing replicated
            if self._on_reject is not None:
                self._on_reject(self.assembler, f"{type(exc).__name__}: {exc}")
            return
        self.board = next_board
        self._broadcast(delta_drop(cube, cell))
        self._broadcast(Highlight(cube=NO_CUBE))
        self._log(EventKind.DROP, cube_id=cube, cell=cell)
        verdict = judge_event(self.puzzle, min(self.progress, 3),
                              SessionEvent(self.now(), EventKind.DROP,
                                           cube_id=cube, cell=cell))
        if verdict is Verdict.WRONG_PLACE:
            self._log(EventKind.WRONG_PLACE, cube_id=cube, cell=cell)
        # Progress is re-derived from the board: a stray drop can pre-place a
        # later cube on its own target (or displace a solved one), and the
        # judged event counter alone would then disagree with reality.
        self.progress = self._derived_progress()
        if self.progress >= 4:
            self._finish_task()

    def _derived_progress(self) -> int:
        cells = {c.id: c.cell for c in self.board.cubes}
        for i, step in enumerate(self.puzzle.solution):
            if cells.get(step.cube_id) != step.target:
                return i
        return 4

    def on_embodiment(self, pid: int, frame) -> None:
        # person-representation stream: relay to the other participant
        self._emit(1 - pid, frame)
