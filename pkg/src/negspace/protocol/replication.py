"""Workspace replication: deltas, snapshots, resync, and pose streams.

The authoritative owner applies board operations, emits one STATE_DELTA per
accepted operation on the reliable channel, and answers resync requests with
STATE_SNAPSHOT.  Replicas apply deltas in arrival order; a sequence gap makes
them drop the delta and ask for a snapshot instead of buffering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

from .. import board as board_ops
from ..board import BoardState, Cube, CubeColor, BoardSpec
from ..errors import NegspaceError
from .wire import (
    NO_CELL,
    NO_CUBE,
    CubeRecord,
    DeltaOp,
    EmbodimentFrame,
    Highlight,
    PoseSample,
    StateDelta,
    StateSnapshot,
)


class SeqGap(NegspaceError):
    """Reliable-stream discontinuity; the replica must request a snapshot."""


def delta_select(cube: int) -> StateDelta:
    return StateDelta(DeltaOp.SELECT, cube=cube)


def delta_pick(cube: int) -> StateDelta:
    return StateDelta(DeltaOp.PICK, cube=cube)


def delta_drop(cube: int, cell) -> StateDelta:
    return StateDelta(DeltaOp.DROP, cube=cube, col=cell[0], row=cell[1])


def delta_deselect() -> StateDelta:
    return StateDelta(DeltaOp.DESELECT)


def apply_delta(state: BoardState, delta: StateDelta) -> BoardState:
    """Apply one replicated operation; used verbatim by authority and replicas."""
    if delta.op is DeltaOp.SELECT:
        return board_ops.select(state, delta.cube)
    if delta.op is DeltaOp.PICK:
        return board_ops.pick(state)
    if delta.op is DeltaOp.DROP:
        return board_ops.drop(state, (delta.col, delta.row))
    if delta.op is DeltaOp.DESELECT:
        return board_ops.deselect(state)
    raise ValueError(f"unknown delta op {delta.op}")


def snapshot_of(state: BoardState) -> StateSnapshot:
    records = []
    for c in state.cubes:
        flags = ((c.id == state.selection) | ((c.id == state.held) << 1)
                 | ((c.id == state.highlight) << 2))
        col, row = (c.cell if c.cell is not None else (NO_CELL, NO_CELL))
        records.append(CubeRecord(cube=c.id, color=int(c.color), col=col, row=row,
                                  flags=flags))
    return StateSnapshot(columns=state.spec.columns, rows=state.spec.rows,
                         cubes=tuple(records))


def board_from_snapshot(snap: StateSnapshot, spec: BoardSpec,
                        edge: float = board_ops.DEFAULT_CUBE_EDGE_M) -> BoardState:
    """Rebuild a board from a snapshot; `spec` supplies the metric geometry
    (the wire only carries grid dimensions)."""
    if (snap.columns, snap.rows) != (spec.columns, spec.rows):
        raise ValueError("snapshot dimensions disagree with the board spec")
    cubes = []
    selection = held = highlight = None
    for rec in snap.cubes:
        cell = None if rec.col == NO_CELL else (rec.col, rec.row)
        cubes.append(Cube(id=rec.cube, color=CubeColor(rec.color), cell=cell, edge=edge))
        if rec.flags & 1:
            selection = rec.cube
        if rec.flags & 2:
            held = rec.cube
        if rec.flags & 4:
            highlight = rec.cube
    return BoardState(spec=spec, cubes=tuple(cubes), selection=selection,
                      held=held, highlight=highlight)


class Replica:
    """Receive-side board mirror with gap detection and snapshot resync."""

    def __init__(self, spec: BoardSpec):
        self.spec = spec
        self.board: Optional[BoardState] = None
        self.last_seq: Optional[int] = None
        self.needs_resync = True
        self.latest_embodiment: Optional[EmbodimentFrame] = None
        self.resync_requests = 0

    def _check_seq(self, seq: int) -> None:
        if self.last_seq is not None and seq != self.last_seq + 1:
            self.needs_resync = True
            self.resync_requests += 1
            raise SeqGap(f"expected seq {self.last_seq + 1}, got {seq}")
        self.last_seq = seq

    def on_snapshot(self, snap: StateSnapshot) -> BoardState:
        # A snapshot re-bases the stream: state and continuity both reset.
        self.board = board_from_snapshot(snap, self.spec)
        self.last_seq = snap.seq
        self.needs_resync = False
        return self.board

    def on_delta(self, delta: StateDelta) -> BoardState:
        self._check_seq(delta.seq)
        if self.board is None or self.needs_resync:
            raise SeqGap("no base snapshot yet")
        self.board = apply_delta(self.board, delta)
        return self.board

    def on_highlight(self, msg: Highlight) -> Optional[BoardState]:
        self._check_seq(msg.seq)
        if self.board is None:
            return None
        from dataclasses import replace
        self.board = replace(self.board,
                             highlight=None if msg.cube == NO_CUBE else msg.cube)
        return self.board

    def on_embodiment(self, frame: EmbodimentFrame) -> None:
        # Rendering-only data: dropping any subset never perturbs the board.
        self._check_seq(frame.seq)
        if (self.latest_embodiment is None
                or frame.frame_seq > self.latest_embodiment.frame_seq):
            self.latest_embodiment = frame

    def on_control(self, seq: int) -> None:
        """Account for other reliable-channel traffic (joins, task control)."""
        self._check_seq(seq)


@dataclass
class PoseStream:
    """Latest-wins pose mirror over the unreliable channel.

    Stale or duplicated samples (seq not beyond the newest seen) are counted
    and dropped, so loss and reordering can never corrupt the mirror.
    """

    latest: Optional[PoseSample] = None
    stale_count: int = 0
    accepted_count: int = 0

    def ingest(self, sample: PoseSample) -> Optional[PoseSample]:
        if self.latest is not None and sample.seq <= self.latest.seq:
            self.stale_count += 1
            return self.latest
        self.latest = sample
        self.accepted_count += 1
        return self.latest


def ingest_pose(stream: PoseStream, sample: PoseSample) -> Optional[PoseSample]:
    return stream.ingest(sample)
