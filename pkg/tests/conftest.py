"""Shared test helpers: deterministic random wire messages and board fixtures."""

import random

import numpy as np

from negspace.board import BoardSpec, initial_board
from negspace.geometry import default_volume
from negspace.protocol import (
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
    StateDelta,
    StateSnapshot,
    TaskComplete,
    TaskStart,
)


def f32(x):
    return float(np.float32(x))


def random_message(rng: random.Random):
    """One valid message of a random type, with f32-quantized float fields."""
    kind = rng.randrange(10)
    seq = rng.randrange(1, 2**32)
    if kind == 0:
        name = "".join(rng.choice("abcdefgh ") for _ in range(rng.randrange(0, 12)))
        return Join(participant=rng.randrange(2), name=name, seq=seq)
    if kind == 1:
        return RoleAssign(participant=rng.randrange(2), role=rng.randrange(2), seq=seq)
    if kind == 2:
        moves = [CubeMove(rng.randrange(5), rng.randrange(8), rng.randrange(5))
                 for _ in range(9)]
        if rng.random() < 0.5:
            return TaskStart(task_index=rng.randrange(1, 9),
                             condition_code=rng.randrange(8),
                             puzzle_id=rng.randrange(2**32), seq=seq)
        return TaskStart(task_index=rng.randrange(1, 9), condition_code=rng.randrange(8),
                         puzzle_id=rng.randrange(2**32), initial=moves[0],
                         starts=tuple(moves[1:5]), solution=tuple(moves[5:9]), seq=seq)
    if kind == 3:
        cubes = tuple(CubeRecord(cube=i, color=i, col=rng.randrange(8),
                                 row=rng.randrange(5), flags=rng.randrange(8))
                      for i in range(5))
        return StateSnapshot(columns=8, rows=5, cubes=cubes, seq=seq)
    if kind == 4:
        return StateDelta(op=DeltaOp(rng.randrange(1, 5)), cube=rng.randrange(5),
                          col=rng.randrange(8), row=rng.randrange(5), seq=seq)
    if kind == 5:
        return Highlight(cube=rng.choice([0, 1, 2, 3, 4, 255]), seq=seq)
    if kind == 6:
        joints = tuple(Joint(j, (f32(rng.uniform(-1, 1)), f32(rng.uniform(-1, 1)),
                                 f32(rng.uniform(-1, 1)))) for j in range(4))
        points = tuple((f32(rng.uniform(-1, 1)), f32(rng.uniform(-1, 1)),
                        f32(rng.uniform(-1, 1)), rng.randrange(256), rng.randrange(256),
                        rng.randrange(256)) for _ in range(rng.randrange(0, 20)))
        return EmbodimentFrame(frame_seq=rng.randrange(2**32),
                               timestamp_us=rng.randrange(2**48),
                               joints=joints, points=points, seq=seq)
    if kind == 7:
        return TaskComplete(task_index=rng.randrange(1, 9),
                            timestamp_us=rng.randrange(2**48), seq=seq)
    if kind == 8:
        quat = [rng.gauss(0, 1) for _ in range(4)]
        norm = sum(q * q for q in quat) ** 0.5 or 1.0
        return PoseSample(timestamp_us=rng.randrange(2**48),
                          head=tuple(f32(rng.uniform(-2, 2)) for _ in range(3)),
                          hand=tuple(f32(rng.uniform(-2, 2)) for _ in range(3)),
                          orientation=tuple(f32(q / norm) for q in quat), seq=seq)
    return ButtonEvent(timestamp_us=rng.randrange(2**48), button=rng.randrange(4),
                       seq=seq)


def five_cube_state():
    spec = BoardSpec.centered_on(default_volume())
    return initial_board(spec, [(0, (4, 2)), (1, (0, 0)), (2, (7, 0)),
                                (3, (0, 4)), (4, (7, 4))])
