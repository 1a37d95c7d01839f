"""Export conformance fixtures for the frontend tests.

Run from the repository root:  python frontend/tools/export_fixtures.py
Writes JSON fixtures the vitest suite checks the TypeScript port against.
"""

import json
from pathlib import Path

import numpy as np

from negspace.awareness import synthesize_instructor_pose
from negspace.board import BoardSpec
from negspace.geometry import (
    DisplayPlane,
    Role,
    aim_orientation,
    default_volume,
    project_point,
    projection_matrix,
)
from negspace.protocol import ButtonEvent, Join, PoseSample, SeqCounter, new_session
from negspace.runtime.config import EngineConfig
from negspace.runtime.gatewire import message_to_doc
from negspace.runtime.server import LiveServer
from negspace.runtime.sessioncore import SessionCore

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def plane_doc(plane):
    return {"lower_left": list(plane.lower_left),
            "lower_right": list(plane.lower_right),
            "upper_left": list(plane.upper_left)}


def export_projection_cases():
    rng = np.random.default_rng(12)
    volume = default_volume()
    cases = []
    configs = [(volume.screen_plane(Role.INSTRUCTOR), [0.1, 0.2, -1.25]),
               (volume.screen_plane(Role.ASSEMBLER), [-0.2, 0.1, 1.4]),
               (DisplayPlane.from_size(1.2, 0.8, center=(0.3, -0.2, 0.5)),
                [0.0, 0.0, 2.0])]
    for screen, eye in configs:
        m = projection_matrix(eye, screen, 0.05, 10.0)
        points = [screen.corners()[i] for i in range(4)]
        points += [screen.center, np.array([0.0, 0.0, 0.0]),
                   rng.uniform(-0.3, 0.3, 3)]
        cases.append({
            "eye": list(map(float, eye)),
            "screen": plane_doc(screen),
            "near": 0.05, "far": 10.0,
            "matrix": [float(x) for row in m for x in row],
            "points": [{"world": [float(v) for v in p],
                        "ndc": [float(v) for v in project_point(m, p)]}
                       for p in points],
        })
    (OUT / "projection_cases.json").write_text(json.dumps(cases, indent=1))


def export_config_doc():
    server = LiveServer(EngineConfig())
    (OUT / "config_doc.json").write_text(json.dumps(server._config_doc(), indent=1))


def export_session_transcript():
    """Drive SessionCore directly through a full correct session and record the
    JSON the gateway would deliver to each participant."""
    config = EngineConfig()
    board_spec = config.board_spec()
    volume = config.volume()
    transcript = []
    clock = {"t": 0.0}

    def tick(dt=0.25):
        clock["t"] += dt

    core = SessionCore(
        session=new_session(pair_id=config.pair_id, puzzle_ids=config.puzzle_seeds),
        board_spec=board_spec, rules=config.rules(), now=lambda: clock["t"],
        send=lambda pid, msg: transcript.append(
            {"to": pid, "message": message_to_doc(
                msg, mask_colors=(msg.__class__.__name__ == "StateSnapshot"
                                  and core.session.role_of(pid) is Role.ASSEMBLER))}))

    seqs = {0: SeqCounter(), 1: SeqCounter()}
    core.on_join(0, Join(participant=0, name="browser-0"))
    core.on_join(1, Join(participant=1, name="browser-1"))

    def aim_and_click(target_point):
        pid = core.assembler
        stance = volume.default_eye(Role.ASSEMBLER, 1.0)
        hand = stance + np.array([0.0, 0.0, -0.35 if stance[2] > 0 else 0.35])
        pose = seqs[pid].stamp(PoseSample(
            timestamp_us=int(clock["t"] * 1e6), head=tuple(stance), hand=tuple(hand),
            orientation=tuple(aim_orientation(hand, target_point))))
        core.on_pose(pid, pose)
        tick()
        core.on_button(pid, seqs[pid].stamp(
            ButtonEvent(timestamp_us=int(clock["t"] * 1e6), button=0)))
        tick()

    while not core.done:
        puzzle = core.puzzle
        for step in puzzle.solution:
            box = next(b for b in core.board.scene_boxes() if b.id == step.cube_id)
            center = (box.lo + box.hi) / 2.0
            aim_and_click(np.array([center[0], float(box.hi[1]) - 0.01, center[2]]))
            floor = board_spec.origin[1]
            cell_center = board_spec.cell_center(step.target)
            aim_and_click(np.array([cell_center[0], floor, cell_center[2]]))
            if core.done:
                break

    (OUT / "session_transcript.json").write_text(json.dumps({
        "tasks": 8,
        "messages": transcript,
    }, indent=1))
    print(f"transcript: {len(transcript)} messages, done={core.done}")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    export_projection_cases()
    export_config_doc()
    export_session_transcript()
    print(f"fixtures written to {OUT}")
