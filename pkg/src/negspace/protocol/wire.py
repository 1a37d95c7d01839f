"""Binary wire format shared by both channels.

Frame layout: magic "NSP1", version u8 (=1), type u8, seq u32 LE, payload
length u32 LE, payload.  All multi-byte integers are little-endian.  Pose
samples and button events travel only on the unreliable datagram channel;
every other type rides the reliable stream.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Optional, Tuple, Union

import numpy as np

from ..board import CubeColor
from ..errors import NegspaceError

MAGIC = b"NSP1"
VERSION = 1
HEADER = struct.Struct("<4sBBII")

NO_CELL = 255
NO_CUBE = 255


class BadMagic(NegspaceError):
    pass


class UnknownType(NegspaceError):
    pass


class LengthMismatch(NegspaceError):
    pass


class TruncatedPayload(NegspaceError):
    pass


class MsgType(IntEnum):
    JOIN = 1
    ROLE_ASSIGN = 2
    TASK_START = 3
    STATE_SNAPSHOT = 4
    STATE_DELTA = 5
    HIGHLIGHT = 6
    EMBODIMENT_FRAME = 7
    TASK_COMPLETE = 8
    POSE_SAMPLE = 9
    BUTTON_EVENT = 10


class Channel(IntEnum):
    RELIABLE = 0
    UNRELIABLE = 1


UNRELIABLE_TYPES = frozenset({MsgType.POSE_SAMPLE, MsgType.BUTTON_EVENT})


def channel_of(msg_type: MsgType) -> Channel:
    return Channel.UNRELIABLE if msg_type in UNRELIABLE_TYPES else Channel.RELIABLE


def _f32(x: float) -> float:
    return float(np.float32(x))


def _f32s(xs) -> Tuple[float, ...]:
    return tuple(_f32(x) for x in xs)


class DeltaOp(IntEnum):
    SELECT = 1
    PICK = 2
    DROP = 3
    DESELECT = 4


@dataclass(frozen=True)
class Join:
    participant: int
    name: str = ""
    seq: int = 0


@dataclass(frozen=True)
class RoleAssign:
    participant: int
    role: int  # 0 instructor, 1 assembler
    seq: int = 0


@dataclass(frozen=True)
class CubeMove:
    cube: int
    col: int
    row: int


@dataclass(frozen=True)
class TaskStart:
    task_index: int
    condition_code: int
    puzzle_id: int
    initial: Optional[CubeMove] = None       # solution details only for the instructor
    starts: Tuple[CubeMove, ...] = ()
    solution: Tuple[CubeMove, ...] = ()
    seq: int = 0

    @property
    def has_solution(self) -> bool:
        return self.initial is not None


@dataclass(frozen=True)
class CubeRecord:
    cube: int
    color: int
    col: int       # NO_CELL while held
    row: int
    flags: int = 0  # bit0 selected, bit1 held, bit2 highlighted


@dataclass(frozen=True)
class StateSnapshot:
    columns: int
    rows: int
    cubes: Tuple[CubeRecord, ...]
    seq: int = 0


@dataclass(frozen=True)
class StateDelta:
    op: DeltaOp
    cube: int = NO_CUBE
    col: int = NO_CELL
    row: int = NO_CELL
    seq: int = 0


@dataclass(frozen=True)
class Highlight:
    cube: int  # NO_CUBE clears the highlight
    seq: int = 0


@dataclass(frozen=True)
class Joint:
    joint_id: int
    position: Tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "position", _f32s(self.position))


@dataclass(frozen=True)
class EmbodimentFrame:
    """Synthetic stand-in for the tracked person: named joints plus a point set."""

    frame_seq: int
    timestamp_us: int
    joints: Tuple[Joint, ...]
    points: Tuple[Tuple[float, float, float, int, int, int], ...] = ()
    seq: int = 0

    MAX_POINTS = 4096
    JOINT_HEAD, JOINT_LEFT_HAND, JOINT_RIGHT_HAND, JOINT_TORSO = 0, 1, 2, 3

    def __post_init__(self):
        if len(self.points) > self.MAX_POINTS:
            raise ValueError(f"point set exceeds {self.MAX_POINTS} per frame")
        object.__setattr__(self, "points", tuple(
            (*_f32s(p[:3]), int(p[3]), int(p[4]), int(p[5])) for p in self.points))


@dataclass(frozen=True)
class TaskComplete:
    task_index: int
    timestamp_us: int
    seq: int = 0


@dataclass(frozen=True)
class PoseSample:
    timestamp_us: int
    head: Tuple[float, float, float]
    hand: Tuple[float, float, float]
    orientation: Tuple[float, float, float, float]  # (x, y, z, w)
    seq: int = 0

    def __post_init__(self):
        object.__setattr__(self, "head", _f32s(self.head))
        object.__setattr__(self, "hand", _f32s(self.hand))
        object.__setattr__(self, "orientation", _f32s(self.orientation))


@dataclass(frozen=True)
class ButtonEvent:
    timestamp_us: int
    button: int = 0
    seq: int = 0


SessionMessage = Union[Join, RoleAssign, TaskStart, StateSnapshot, StateDelta,
                       Highlight, EmbodimentFrame, TaskComplete, PoseSample,
                       ButtonEvent]

_TYPE_OF = {
    Join: MsgType.JOIN,
    RoleAssign: MsgType.ROLE_ASSIGN,
    TaskStart: MsgType.TASK_START,
    StateSnapshot: MsgType.STATE_SNAPSHOT,
    StateDelta: MsgType.STATE_DELTA,
    Highlight: MsgType.HIGHLIGHT,
    EmbodimentFrame: MsgType.EMBODIMENT_FRAME,
    TaskComplete: MsgType.TASK_COMPLETE,
    PoseSample: MsgType.POSE_SAMPLE,
    ButtonEvent: MsgType.BUTTON_EVENT,
}


def message_type(msg: SessionMessage) -> MsgType:
    try:
        return _TYPE_OF[type(msg)]
    except KeyError:
        raise UnknownType(f"not a wire message: {type(msg).__name__}")


def message_channel(msg: SessionMessage) -> Channel:
    return channel_of(message_type(msg))


# --- payload packing ---------------------------------------------------------

_MOVE = struct.Struct("<BBB")
_CUBE_REC = struct.Struct("<BBBBB")
_POSE = struct.Struct("<Q3f3f4f")
_BUTTON = struct.Struct("<QB")
_TASK_COMPLETE = struct.Struct("<BQ")
_JOINT = struct.Struct("<B3f")
_POINT = struct.Struct("<3f3B")


def _pack_payload(msg: SessionMessage) -> bytes:
    if isinstance(msg, Join):
        name = msg.name.encode("utf-8")
        if len(name) > 255:
            raise ValueError("join name too long")
        return struct.pack("<BB", msg.participant, len(name)) + name
    if isinstance(msg, RoleAssign):
        return struct.pack("<BB", msg.participant, msg.role)
    if isinstance(msg, TaskStart):
        head = struct.pack("<BBIB", msg.task_index, msg.condition_code,
                           msg.puzzle_id, 1 if msg.has_solution else 0)
        if not msg.has_solution:
            return head
        if len(msg.starts) != 4 or len(msg.solution) != 4:
            raise ValueError("a solution-bearing task start carries 4 starts and 4 steps")
        moves = [msg.initial, *msg.starts, *msg.solution]
        return head + b"".join(_MOVE.pack(m.cube, m.col, m.row) for m in moves)
    if isinstance(msg, StateSnapshot):
        if len(msg.cubes) != 5:
            raise ValueError("a snapshot carries exactly 5 cube records")
        return struct.pack("<BB", msg.columns, msg.rows) + b"".join(
            _CUBE_REC.pack(c.cube, c.color, c.col, c.row, c.flags) for c in msg.cubes)
    if isinstance(msg, StateDelta):
        return struct.pack("<BBBB", int(msg.op), msg.cube, msg.col, msg.row)
    if isinstance(msg, Highlight):
        return struct.pack("<B", msg.cube)
    if isinstance(msg, EmbodimentFrame):
        out = [struct.pack("<IQB", msg.frame_seq, msg.timestamp_us, len(msg.joints))]
        out += [_JOINT.pack(j.joint_id, *j.position) for j in msg.joints]
        out.append(struct.pack("<H", len(msg.points)))
        out += [_POINT.pack(*p) for p in msg.points]
        return b"".join(out)
    if isinstance(msg, TaskComplete):
        return _TASK_COMPLETE.pack(msg.task_index, msg.timestamp_us)
    if isinstance(msg, PoseSample):
        return _POSE.pack(msg.timestamp_us, *msg.head, *msg.hand, *msg.orientation)
    if isinstance(msg, ButtonEvent):
        return _BUTTON.pack(msg.timestamp_us, msg.button)
    raise UnknownType(f"not a wire message: {type(msg).__name__}")


def _need(data: bytes, n: int, what: str) -> None:
    if len(data) < n:
        raise LengthMismatch(f"{what}: need {n} bytes, have {len(data)}")


def _unpack_payload(msg_type: MsgType, data: bytes, seq: int) -> SessionMessage:
    if msg_type is MsgType.JOIN:
        _need(data, 2, "join")
        participant, name_len = struct.unpack_from("<BB", data)
        _need(data, 2 + name_len, "join name")
        if len(data) != 2 + name_len:
            raise LengthMismatch("join payload has trailing bytes")
        return Join(participant, data[2:2 + name_len].decode("utf-8"), seq)
    if msg_type is MsgType.ROLE_ASSIGN:
        if len(data) != 2:
            raise LengthMismatch("role assign payload must be 2 bytes")
        p, r = struct.unpack("<BB", data)
        return RoleAssign(p, r, seq)
    if msg_type is MsgType.TASK_START:
        _need(data, 7, "task start")
        idx, cond, pid, flags = struct.unpack_from("<BBIB", data)
        if not flags & 1:
            if len(data) != 7:
                raise LengthMismatch("task start payload has trailing bytes")
            return TaskStart(idx, cond, pid, seq=seq)
        if len(data) != 7 + 9 * _MOVE.size:
            raise LengthMismatch("solution-bearing task start must carry 9 cube moves")
        moves = [CubeMove(*_MOVE.unpack_from(data, 7 + i * _MOVE.size)) for i in range(9)]
        return TaskStart(idx, cond, pid, initial=moves[0], starts=tuple(moves[1:5]),
                         solution=tuple(moves[5:9]), seq=seq)
    if msg_type is MsgType.STATE_SNAPSHOT:
        if len(data) != 2 + 5 * _CUBE_REC.size:
            raise LengthMismatch("snapshot must carry board dims and 5 cube records")
        cols, rows = struct.unpack_from("<BB", data)
        cubes = tuple(CubeRecord(*_CUBE_REC.unpack_from(data, 2 + i * _CUBE_REC.size))
                      for i in range(5))
        return StateSnapshot(cols, rows, cubes, seq)
    if msg_type is MsgType.STATE_DELTA:
        if len(data) != 4:
            raise LengthMismatch("state delta payload must be 4 bytes")
        op, cube, col, row = struct.unpack("<BBBB", data)
        try:
            return StateDelta(DeltaOp(op), cube, col, row, seq)
        except ValueError:
            raise UnknownType(f"unknown delta op {op}")
    if msg_type is MsgType.HIGHLIGHT:
        if len(data) != 1:
            raise LengthMismatch("highlight payload must be 1 byte")
        return Highlight(data[0], seq)
    if msg_type is MsgType.EMBODIMENT_FRAME:
        _need(data, 13, "embodiment frame")
        frame_seq, ts, joint_count = struct.unpack_from("<IQB", data)
        off = 13
        _need(data, off + joint_count * _JOINT.size + 2, "embodiment joints")
        joints = []
        for _ in range(joint_count):
            jid, x, y, z = _JOINT.unpack_from(data, off)
            joints.append(Joint(jid, (x, y, z)))
            off += _JOINT.size
        (point_count,) = struct.unpack_from("<H", data, off)
        off += 2
        if len(data) != off + point_count * _POINT.size:
            raise LengthMismatch("embodiment frame point count disagrees with payload")
        points = []
        for _ in range(point_count):
            x, y, z, r, g, b = _POINT.unpack_from(data, off)
            points.append((x, y, z, r, g, b))
            off += _POINT.size
        return EmbodimentFrame(frame_seq, ts, tuple(joints), tuple(points), seq)
    if msg_type is MsgType.TASK_COMPLETE:
        if len(data) != _TASK_COMPLETE.size:
            raise LengthMismatch("task complete payload size")
        idx, ts = _TASK_COMPLETE.unpack(data)
        return TaskComplete(idx, ts, seq)
    if msg_type is MsgType.POSE_SAMPLE:
        if len(data) != _POSE.size:
            raise LengthMismatch("pose sample payload size")
        vals = _POSE.unpack(data)
        return PoseSample(vals[0], vals[1:4], vals[4:7], vals[7:11], seq)
    if msg_type is MsgType.BUTTON_EVENT:
        if len(data) != _BUTTON.size:
            raise LengthMismatch("button event payload size")
        ts, button = _BUTTON.unpack(data)
        return ButtonEvent(ts, button, seq)
    raise UnknownType(f"unhandled type {msg_type}")


def encode(msg: SessionMessage) -> bytes:
    """Serialize one message into a framed byte string."""
    payload = _pack_payload(msg)
    return HEADER.pack(MAGIC, VERSION, int(message_type(msg)), msg.seq,
                       len(payload)) + payload


def decode(data: bytes) -> SessionMessage:
    """Parse exactly one frame; raises on anything malformed."""
    msg, used = decode_prefix(data)
    if used != len(data):
        raise LengthMismatch(f"frame has {len(data) - used} trailing bytes")
    return msg


def decode_prefix(data: bytes) -> Tuple[SessionMessage, int]:
    """Parse one frame off the front of `data`; returns (message, bytes used)."""
    if len(data) < HEADER.size:
        raise TruncatedPayload(f"need {HEADER.size} header bytes, have {len(data)}")
    magic, version, type_code, seq, length = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise UnknownType(f"unsupported version {version}")
    try:
        msg_type = MsgType(type_code)
    except ValueError:
        raise UnknownType(f"unknown message type {type_code}")
    end = HEADER.size + length
    if len(data) < end:
        raise TruncatedPayload(f"declared payload {length}, have {len(data) - HEADER.size}")
    return _unpack_payload(msg_type, data[HEADER.size:end], seq), end


class FrameStream:
    """Reassembles frames from a byte stream (the reliable TCP path)."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> List[SessionMessage]:
        self._buf.extend(data)
        out = []
        while True:
            if len(self._buf) < HEADER.size:
                return out
            magic, version, type_code, seq, length = HEADER.unpack_from(self._buf)
            end = HEADER.size + length
            if len(self._buf) < end:
                return out
            out.append(decode(bytes(self._buf[:end])))
            del self._buf[:end]


class SeqCounter:
    """Strictly increasing per-sender per-channel sequence numbers."""

    def __init__(self):
        self._next = {Channel.RELIABLE: 1, Channel.UNRELIABLE: 1}

    def stamp(self, msg: SessionMessage) -> SessionMessage:
        ch = message_channel(msg)
        seq = self._next[ch]
        self._next[ch] = seq + 1
        from dataclasses import replace
        return replace(msg, seq=seq)
