"""Text (JSON) encoding of the wire schema for the web gateway.

Field-for-field mirror of the binary frames: every message converts both
ways, and re-encoding a JSON frame to binary reproduces the native bytes.
"""

from __future__ import annotations

import json
from typing import Tuple

from ..protocol import (
    ButtonEvent,
    CubeMove,
    CubeRecord,
    DeltaOp,
    EmbodimentFrame,
    Highlight,
    Join,
    Joint,
    PoseSample,
    RoleAssign,
    SessionMessage,
    StateDelta,
    StateSnapshot,
    TaskComplete,
    TaskStart,
    UnknownType,
)


def _move_doc(m: CubeMove) -> dict:
    return {"cube": m.cube, "col": m.col, "row": m.row}


def _move_from(doc: dict) -> CubeMove:
    return CubeMove(cube=int(doc["cube"]), col=int(doc["col"]), row=int(doc["row"]))


def message_to_doc(msg: SessionMessage, mask_colors: bool = False) -> dict:
    """JSON-ready document for a message.  `mask_colors` blanks cube colors in
    snapshots, which is how the server keeps them secret from the assembler."""
    if isinstance(msg, Join):
        return {"type": "join", "seq": msg.seq, "participant": msg.participant,
                "name": msg.name}
    if isinstance(msg, RoleAssign):
        return {"type": "role_assign", "seq": msg.seq, "participant": msg.participant,
                "role": msg.role}
    if isinstance(msg, TaskStart):
        doc = {"type": "task_start", "seq": msg.seq, "task_index": msg.task_index,
               "condition_code": msg.condition_code, "puzzle_id": msg.puzzle_id}
        if msg.has_solution:
            doc["initial"] = _move_doc(msg.initial)
            doc["starts"] = [_move_doc(m) for m in msg.starts]
            doc["solution"] = [_move_doc(m) for m in msg.solution]
        return doc
    if isinstance(msg, StateSnapshot):
        cubes = []
        for c in msg.cubes:
            rec = {"cube": c.cube, "col": c.col, "row": c.row, "flags": c.flags}
            if not mask_colors:
                rec["color"] = c.color
            cubes.append(rec)
        return {"type": "state_snapshot", "seq": msg.seq, "columns": msg.columns,
                "rows": msg.rows, "cubes": cubes}
    if isinstance(msg, StateDelta):
        return {"type": "state_delta", "seq": msg.seq, "op": int(msg.op),
                "cube": msg.cube, "col": msg.col, "row": msg.row}
    if isinstance(msg, Highlight):
        return {"type": "highlight", "seq": msg.seq, "cube": msg.cube}
    if isinstance(msg, EmbodimentFrame):
        return {"type": "embodiment_frame", "seq": msg.seq, "frame_seq": msg.frame_seq,
                "timestamp_us": msg.timestamp_us,
                "joints": [{"joint_id": j.joint_id, "position": list(j.position)}
                           for j in msg.joints],
                "points": [list(p) for p in msg.points]}
    if isinstance(msg, TaskComplete):
        return {"type": "task_complete", "seq": msg.seq, "task_index": msg.task_index,
                "timestamp_us": msg.timestamp_us}
    if isinstance(msg, PoseSample):
        return {"type": "pose_sample", "seq": msg.seq, "timestamp_us": msg.timestamp_us,
                "head": list(msg.head), "hand": list(msg.hand),
                "orientation": list(msg.orientation)}
    if isinstance(msg, ButtonEvent):
        return {"type": "button_event", "seq": msg.seq,
                "timestamp_us": msg.timestamp_us, "button": msg.button}
    raise UnknownType(f"not a wire message: {type(msg).__name__}")


def message_from_doc(doc: dict) -> SessionMessage:
    kind = doc.get("type")
    seq = int(doc.get("seq", 0))
    if kind == "join":
        return Join(participant=int(doc["participant"]), name=doc.get("name", ""),
                    seq=seq)
    if kind == "role_assign":
        return RoleAssign(participant=int(doc["participant"]), role=int(doc["role"]),
                          seq=seq)
    if kind == "task_start":
        if "initial" in doc:
            return TaskStart(task_index=int(doc["task_index"]),
                             condition_code=int(doc["condition_code"]),
                             puzzle_id=int(doc["puzzle_id"]),
                             initial=_move_from(doc["initial"]),
                             starts=tuple(_move_from(m) for m in doc["starts"]),
                             solution=tuple(_move_from(m) for m in doc["solution"]),
                             seq=seq)
        return TaskStart(task_index=int(doc["task_index"]),
                         condition_code=int(doc["condition_code"]),
                         puzzle_id=int(doc["puzzle_id"]), seq=seq)
    if kind == "state_snapshot":
        cubes = tuple(CubeRecord(cube=int(c["cube"]), color=int(c.get("color", 255)),
                                 col=int(c["col"]), row=int(c["row"]),
                                 flags=int(c.get("flags", 0)))
                      for c in doc["cubes"])
        return StateSnapshot(columns=int(doc["columns"]), rows=int(doc["rows"]),
                             cubes=cubes, seq=seq)
    if kind == "state_delta":
        return StateDelta(op=DeltaOp(int(doc["op"])), cube=int(doc["cube"]),
                          col=int(doc["col"]), row=int(doc["row"]), seq=seq)
    if kind == "highlight":
        return Highlight(cube=int(doc["cube"]), seq=seq)
    if kind == "embodiment_frame":
        joints = tuple(Joint(int(j["joint_id"]), tuple(j["position"]))
                       for j in doc["joints"])
        points = tuple(tuple(p) for p in doc.get("points", []))
        return EmbodimentFrame(frame_seq=int(doc["frame_seq"]),
                               timestamp_us=int(doc["timestamp_us"]),
                               joints=joints, points=points, seq=seq)
    if kind == "task_complete":
        return TaskComplete(task_index=int(doc["task_index"]),
                            timestamp_us=int(doc["timestamp_us"]), seq=seq)
    if kind == "pose_sample":
        return PoseSample(timestamp_us=int(doc["timestamp_us"]),
                          head=tuple(doc["head"]), hand=tuple(doc["hand"]),
                          orientation=tuple(doc["orientation"]), seq=seq)
    if kind == "button_event":
        return ButtonEvent(timestamp_us=int(doc["timestamp_us"]),
                           button=int(doc.get("button", 0)), seq=seq)
    raise UnknownType(f"unknown text frame type {kind!r}")


def message_to_text(msg: SessionMessage, mask_colors: bool = False) -> str:
    return json.dumps(message_to_doc(msg, mask_colors=mask_colors), sort_keys=True)


def message_from_text(text: str) -> SessionMessage:
    return message_from_doc(json.loads(text))
