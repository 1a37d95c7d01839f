"""Scripted participants for headless sessions.

The instructor knows the solution and issues positional instructions (the
assembler cannot see colors); the assembler executes them through the real
pointing pipeline: pose bursts aim the ray, a hover highlight confirms the
selection, button events pick and drop.  A frame-naive assembler misreads an
axis with the configured probability whenever the awareness matrix marks
that verbal channel as mismatched, then recalibrates after two corrections,
mirroring how study pairs converged on a shared protocol.  These agents are
demonstration plumbing: none of their parameters model human performance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..awareness import ChannelMatch, ChannelMatchReport
from ..board import BoardSpec, Cell
from ..geometry import Role, WorkspaceVolume, aim_orientation
from ..protocol import (
    ButtonEvent,
    EmbodimentFrame,
    Highlight,
    Join,
    Joint,
    PoseSample,
    Replica,
    RoleAssign,
    SeqCounter,
    SeqGap,
    StateDelta,
    StateSnapshot,
    TaskComplete,
    TaskStart,
)
from ..tasks import CUBE_IDS


class Interpretation(Enum):
    FRAME_AWARE = "frame_aware"
    FRAME_NAIVE = "frame_naive"


@dataclass(frozen=True)
class AgentPolicy:
    """Behavioral knobs for one participant (role is the initial assignment)."""

    role: Role
    aiming_noise_rad: float = 0.0
    interpretation: Interpretation = Interpretation.FRAME_AWARE
    misread_probability: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.misread_probability <= 1.0:
            raise ValueError("misread probability must be in [0, 1]")
        if self.aiming_noise_rad < 0:
            raise ValueError("aiming noise must be non-negative")


@dataclass(frozen=True)
class Instruction:
    """One positional utterance: move the cube at `source` to `target`.

    `source` None means the cube currently in the assembler's hand.
    Frame-correct instructions (corrections, undo requests) are expressed in
    the assembler's own frame and are never misread.
    """

    source: Optional[Cell]
    target: Cell
    frame_correct: bool = False


# timing constants (virtual seconds); coarse human-ish pacing
SPEECH_DELAY = 0.8
THINK_DELAY = 0.5
TICK = 0.05
POSE_BURST = 4
POSE_INTERVAL = 1.0 / 60.0
SETTLE_DELAY = 0.25
CONFIRM_TIMEOUT = 1.0
MAX_DROP_FAILURES = 3
CALIBRATION_LIMIT = 2  # misreads per axis before the assembler adapts
EMBODIMENT_PERIOD = 0.5


class _Phase(Enum):
    IDLE = "idle"
    WAIT_SELECT = "wait_select"
    WAIT_HELD = "wait_held"
    WAIT_DROPPED = "wait_dropped"


class ParticipantAgent:
    """One scripted participant; behavior follows its currently assigned role."""

    def __init__(self, pid: int, policy: AgentPolicy, volume: WorkspaceVolume,
                 board_spec: BoardSpec, rng: random.Random,
                 clock_now: Callable[[], float],
                 schedule: Callable[[float, Callable[[], None]], None],
                 send_reliable: Callable[[object], None],
                 send_unreliable: Callable[[object], None],
                 reports_by_code: Dict[int, ChannelMatchReport],
                 pace: float = 1.0):
        self.pid = pid
        self.policy = policy
        self.volume = volume
        self.board_spec = board_spec
        self.rng = rng
        self.now = clock_now
        self.schedule = schedule
        self._send_reliable = send_reliable
        self._send_unreliable = send_unreliable
        self.reports_by_code = reports_by_code
        self.pace = pace  # < 1 compresses the conversational pacing

        self.seq = SeqCounter()
        self.replica = Replica(board_spec)
        self.role: Optional[Role] = None
        self.partner: Optional["ParticipantAgent"] = None
        self.session_over = False

        # task context
        self.condition_code = 0
        self.solution: List[Tuple[int, Cell]] = []   # instructor only
        self.initial: Optional[Tuple[int, Cell]] = None
        self.start_corners: Dict[int, Cell] = {}

        # assembler execution state
        self.phase = _Phase.IDLE
        self.instruction: Optional[Instruction] = None
        self.mission_cube: Optional[int] = None
        self.believed_target: Optional[Cell] = None
        self.deadline = 0.0
        self.drop_failures = 0
        self.misread_counts = {"lateral": 0, "depth": 0}

        # instructor state
        self.awaiting_report = False

        self.stats = {"poses_sent": 0, "clicks_sent": 0, "click_retries": 0,
                      "misreads": 0, "instructions": 0, "corrections": 0}
        self._ticking = False
        self._embodiment_scheduled = False
        self._frame_seq = 0

    # --- wiring -------------------------------------------------------------

    def send_reliable(self, msg) -> None:
        self._send_reliable(self.seq.stamp(msg))

    def send_unreliable(self, msg) -> None:
        self._send_unreliable(self.seq.stamp(msg))

    def join(self, name: str = "") -> None:
        self.send_reliable(Join(participant=self.pid, name=name or f"agent-{self.pid}"))

    # --- message intake -------------------------------------------------------

    def on_message(self, msg) -> None:
        if isinstance(msg, RoleAssign):
            self.replica.on_control(msg.seq)
            self.role = Role.INSTRUCTOR if msg.role == 0 else Role.ASSEMBLER
            self._reset_task_state()
        elif isinstance(msg, TaskStart):
            self.replica.on_control(msg.seq)
            self._reset_task_state()
            self.condition_code = msg.condition_code
            if msg.has_solution:
                self.initial = (msg.initial.cube, (msg.initial.col, msg.initial.row))
                self.start_corners = {m.cube: (m.col, m.row) for m in msg.starts}
                self.solution = [(m.cube, (m.col, m.row)) for m in msg.solution]
                self.schedule(SPEECH_DELAY * self.pace, self._instructor_evaluate)
                self._ensure_embodiment()
        elif isinstance(msg, StateSnapshot):
            self.replica.on_snapshot(msg)
        elif isinstance(msg, StateDelta):
            self.replica.on_delta(msg)
        elif isinstance(msg, Highlight):
            self.replica.on_highlight(msg)
        elif isinstance(msg, EmbodimentFrame):
            self.replica.on_embodiment(msg)
        elif isinstance(msg, TaskComplete):
            self.replica.on_control(msg.seq)
            self._reset_task_state()
            if msg.task_index >= 8:
                self.session_over = True

    def _reset_task_state(self) -> None:
        self.phase = _Phase.IDLE
        self.instruction = None
        self.mission_cube = None
        self.believed_target = None
        self.drop_failures = 0
        self.misread_counts = {"lateral": 0, "depth": 0}
        self.solution = []
        self.initial = None
        self.start_corners = {}
        self.awaiting_report = False

    # --- instructor ---------------------------------------------------------

    def _instructor_evaluate(self) -> None:
        if (self.session_over or self.role is not Role.INSTRUCTOR
                or not self.solution or self.replica.board is None
                or self.awaiting_report):
            return
        board = self.replica.board
        cells = {c.id: c.cell for c in board.cubes}

        instruction = None
        if board.held is not None:
            # something in the assembler's hand: have it placed properly
            instruction = Instruction(source=None,
                                      target=self._proper_cell(board.held, cells),
                                      frame_correct=True)
        elif self.initial is not None and cells.get(self.initial[0]) != self.initial[1]:
            instruction = Instruction(source=cells[self.initial[0]],
                                      target=self.initial[1], frame_correct=True)
        else:
            pending = self._first_pending(cells)
            if pending is None:
                return  # solved; the fade signal is on its way
            cube, target = self.solution[pending]
            blocker = next((cid for cid, cell in cells.items()
                            if cell == target and cid != cube), None)
            if blocker is not None:
                instruction = Instruction(source=target,
                                          target=self._proper_cell(blocker, cells),
                                          frame_correct=True)
            elif cells.get(cube) not in (self.start_corners.get(cube), target):
                instruction = Instruction(source=cells[cube], target=target,
                                          frame_correct=True)
            else:
                instruction = Instruction(source=cells[cube], target=target)
        if instruction.frame_correct:
            self.stats["corrections"] += 1
        self.stats["instructions"] += 1
        self.awaiting_report = True
        partner = self.partner
        self.schedule(SPEECH_DELAY * self.pace,
                      lambda: partner.on_instruction(instruction))

    def _first_pending(self, cells: Dict[int, Optional[Cell]]) -> Optional[int]:
        for i, (cube, target) in enumerate(self.solution):
            if cells.get(cube) != target:
                return i
        return None

    def _proper_cell(self, cube: int, cells: Dict[int, Optional[Cell]]) -> Cell:
        """Where a cube belongs right now: its solved target if its step is
        already due and it is the pending cube, otherwise its start corner."""
        pending = self._first_pending(cells)
        if pending is not None and self.solution[pending][0] == cube:
            return self.solution[pending][1]
        if cube in self.start_corners:
            return self.start_corners[cube]
        return self.initial[1] if self.initial and cube == self.initial[0] \
            else self.board_spec.center_cell

    def on_assembler_report(self) -> None:
        self.awaiting_report = False
        self.schedule(THINK_DELAY * self.pace, self._instructor_evaluate)

    def _ensure_embodiment(self) -> None:
        if self._embodiment_scheduled:
            return
        self._embodiment_scheduled = True
        self._send_embodiment()

    def _send_embodiment(self) -> None:
        if self.session_over or self.role is not Role.INSTRUCTOR:
            self._embodiment_scheduled = False
            return
        z = -(self.volume.depth / 2.0 + 1.0)
        self._frame_seq += 1
        frame = EmbodimentFrame(
            frame_seq=self._frame_seq, timestamp_us=int(self.now() * 1e6),
            joints=(Joint(EmbodimentFrame.JOINT_HEAD, (0.0, 0.35, z)),
                    Joint(EmbodimentFrame.JOINT_LEFT_HAND, (-0.25, -0.1, z + 0.2)),
                    Joint(EmbodimentFrame.JOINT_RIGHT_HAND, (0.2, 0.0, z + 0.35)),
                    Joint(EmbodimentFrame.JOINT_TORSO, (0.0, 0.0, z))))
        self.send_reliable(frame)
        self.schedule(EMBODIMENT_PERIOD * self.pace, self._send_embodiment)

    # --- assembler -------------------------------------------------------------

    def on_instruction(self, instruction: Instruction) -> None:
        if self.session_over or self.role is not Role.ASSEMBLER:
            return
        self.instruction = self._interpret(instruction)
        self.drop_failures = 0
        self._begin_mission()

    def _interpret(self, instruction: Instruction) -> Instruction:
        if (instruction.frame_correct
                or self.policy.interpretation is Interpretation.FRAME_AWARE
                or self.policy.misread_probability == 0.0):
            return instruction
        report = self.reports_by_code.get(self.condition_code)
        if report is None:
            return instruction
        flip_lateral = (report.lateral_verbal is ChannelMatch.MISMATCH
                        and self.misread_counts["lateral"] < CALIBRATION_LIMIT
                        and self.rng.random() < self.policy.misread_probability)
        flip_depth = (report.depth_verbal is ChannelMatch.MISMATCH
                      and self.misread_counts["depth"] < CALIBRATION_LIMIT
                      and self.rng.random() < self.policy.misread_probability)
        if not flip_lateral and not flip_depth:
            return instruction
        self.stats["misreads"] += 1
        if flip_lateral:
            self.misread_counts["lateral"] += 1
        if flip_depth:
            self.misread_counts["depth"] += 1

        def flip(cell: Optional[Cell]) -> Optional[Cell]:
            if cell is None:
                return None
            col, row = cell
            if flip_lateral:
                col = self.board_spec.columns - 1 - col
            if flip_depth:
                row = self.board_spec.rows - 1 - row
            return (col, row)

        return Instruction(source=flip(instruction.source),
                           target=flip(instruction.target), frame_correct=False)

    def _begin_mission(self) -> None:
        board = self.replica.board
        if board is None or self.instruction is None:
            self._report_back()
            return
        self.believed_target = self.instruction.target
        if self.instruction.source is None or board.held is not None:
            self.mission_cube = board.held
            if self.mission_cube is None:
                self._report_back()
                return
            self._aim_and_drop()
            return
        cube = board.cube_at(self.instruction.source)
        if cube is None:
            cube = self._nearest_cube(self.instruction.source)
        if cube is None:
            self._report_back()
            return
        self.mission_cube = cube.id
        self._aim_and_select()

    def _nearest_cube(self, cell: Cell):
        board = self.replica.board
        target = self.board_spec.cell_center(cell)
        best, best_d = None, float("inf")
        for c in board.cubes:
            if c.cell is None:
                continue
            d = float(np.linalg.norm(self.board_spec.cell_center(c.cell) - target))
            if d < best_d:
                best, best_d = c, d
        return best

    def _hand_position(self) -> np.ndarray:
        z = self.volume.depth / 2.0 + 1.0 - 0.35
        return np.array([0.0, 0.0, z if self.role is Role.ASSEMBLER else -z])

    def _noisy_aim(self, hand: np.ndarray, at: np.ndarray) -> np.ndarray:
        direction = at - hand
        direction = direction / np.linalg.norm(direction)
        if self.policy.aiming_noise_rad > 0:
            wobble = np.array([self.rng.gauss(0, self.policy.aiming_noise_rad)
                               for _ in range(3)])
            wobble -= direction * float(np.dot(wobble, direction))
            direction = direction + wobble
            direction = direction / np.linalg.norm(direction)
        return aim_orientation(hand, hand + direction)

    def _send_pose_burst(self, at: np.ndarray) -> None:
        hand = self._hand_position()
        head = hand + np.array([0.0, 0.35, 0.35 if self.role is Role.ASSEMBLER else -0.35])
        for i in range(POSE_BURST):
            orientation = self._noisy_aim(hand, at)
            sample = PoseSample(timestamp_us=int((self.now() + i * POSE_INTERVAL) * 1e6),
                                head=tuple(head), hand=tuple(hand),
                                orientation=tuple(orientation))
            self.schedule(i * POSE_INTERVAL,
                          lambda s=sample: self.send_unreliable(s))
            self.stats["poses_sent"] += 1

    def _cube_aim_point(self, cube_id: int) -> Optional[np.ndarray]:
        board = self.replica.board
        for box in board.scene_boxes():
            if box.id == cube_id:
                center = (box.lo + box.hi) / 2.0
                return np.array([center[0], box.hi[1] - 0.25 * (box.hi[1] - box.lo[1]),
                                 center[2]])
        return None

    def _aim_and_select(self) -> None:
        if self.session_over:
            return
        at = self._cube_aim_point(self.mission_cube)
        if at is None:  # cube vanished from the grid (someone holds it)
            self._report_back()
            return
        self._send_pose_burst(at)
        self.phase = _Phase.WAIT_SELECT
        # the burst runs at real 60 Hz; the confirm window starts after it
        self.deadline = (self.now() + POSE_BURST * POSE_INTERVAL
                         + CONFIRM_TIMEOUT * self.pace)
        self._ensure_tick()

    def _aim_and_drop(self) -> None:
        if self.session_over:
            return
        floor = self.board_spec.origin[1]
        center = self.board_spec.cell_center(self.believed_target)
        self._send_pose_burst(np.array([center[0], floor, center[2]]))
        self.phase = _Phase.WAIT_DROPPED
        self.deadline = (self.now() + POSE_BURST * POSE_INTERVAL
                         + (CONFIRM_TIMEOUT + SETTLE_DELAY) * self.pace)
        self.schedule(POSE_BURST * POSE_INTERVAL + SETTLE_DELAY * self.pace, self._click)
        self._ensure_tick()

    def _click(self) -> None:
        if self.session_over:
            return
        self.stats["clicks_sent"] += 1
        self.send_unreliable(ButtonEvent(timestamp_us=int(self.now() * 1e6), button=0))

    def _ensure_tick(self) -> None:
        if not self._ticking:
            self._ticking = True
            self.schedule(TICK * self.pace, self._tick)

    def _tick(self) -> None:
        self._ticking = False
        if self.session_over or self.phase is _Phase.IDLE:
            return
        board = self.replica.board
        if board is None:
            self._ensure_tick()
            return
        if self.phase is _Phase.WAIT_SELECT:
            if board.selection == self.mission_cube and board.held is None:
                self.phase = _Phase.WAIT_HELD
                self.deadline = self.now() + CONFIRM_TIMEOUT * self.pace
                self._click()
            elif self.now() > self.deadline:
                self._aim_and_select()  # poses lost or hover drifted: re-aim
        elif self.phase is _Phase.WAIT_HELD:
            if board.held == self.mission_cube:
                self._aim_and_drop()
            elif self.now() > self.deadline:
                self.stats["click_retries"] += 1
                self.deadline = self.now() + CONFIRM_TIMEOUT * self.pace
                self._click()
        elif self.phase is _Phase.WAIT_DROPPED:
            cube_cell = None
            for c in board.cubes:
                if c.id == self.mission_cube:
                    cube_cell = c.cell
            if board.held is None and cube_cell is not None:
                self.phase = _Phase.IDLE
                self._report_back()
                return
            if self.now() > self.deadline:
                self.drop_failures += 1
                self.stats["click_retries"] += 1
                if self.drop_failures >= MAX_DROP_FAILURES and board.held is not None:
                    # believed cell must be blocked: put the cube anywhere free
                    free = self._nearest_free_cell(self.believed_target)
                    if free is not None:
                        self.believed_target = free
                        self.drop_failures = 0
                self._aim_and_drop()
        self._ensure_tick()

    def _nearest_free_cell(self, near: Cell) -> Optional[Cell]:
        board = self.replica.board
        occupied = {c.cell for c in board.cubes if c.cell is not None}
        candidates = [cell for cell in self.board_spec.all_cells
                      if cell not in occupied]
        if not candidates:
            return None
        center = self.board_spec.cell_center(near)
        return min(candidates, key=lambda cell: (
            float(np.linalg.norm(self.board_spec.cell_center(cell) - center)), cell))

    def _report_back(self) -> None:
        self.phase = _Phase.IDLE
        self.instruction = None
        partner = self.partner
        if partner is not None:
            self.schedule(0.3 * self.pace, partner.on_assembler_report)
