"""Reference-frame consistency analysis.

For each condition this derives, from geometry alone, which communication
channels stay coherent between instructor and assembler: lateral and depth
pointing (does the rendered ray land on the intended column/row for every
board cell?), lateral and depth verbal directions (do left/right and
near/far orderings agree on both screens?), and whether both participants
see the same face of a cube.  Everything is computed by exercising the ray
and glue machinery cell by cell, never by table lookup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .board import BoardSpec, BoardState
from .errors import NegspaceError
from .geometry import (
    Aabb,
    ConditionSpec,
    GlueEntity,
    Pose,
    Role,
    WorkspaceVolume,
    aim_orientation,
    glue_transform,
    quat_rotate,
    raycast,
    require_unit_quaternion,
    POINTER_FORWARD,
)

STANCE_M = 1.0            # participants start one meter from their display
HAND_REACH_M = 0.35       # pointer hand extended in front of the chest
DEFAULT_ANGLE_THRESHOLD = 0.08  # radians; ambiguity margin, tunable


class ChannelMatch(Enum):
    MATCH = "match"
    MISMATCH = "mismatch"

    @classmethod
    def of(cls, flag: bool) -> "ChannelMatch":
        return cls.MATCH if flag else cls.MISMATCH


@dataclass(frozen=True)
class ChannelMatchReport:
    condition: ConditionSpec
    lateral_pointing: ChannelMatch
    depth_pointing: ChannelMatch
    lateral_verbal: ChannelMatch
    depth_verbal: ChannelMatch
    shared_visible_face: bool


def synthesize_instructor_pose(volume: WorkspaceVolume, aim_at) -> Pose:
    """Instructor standing on the floor mat, arm extended, aiming exactly at a point.

    The exact aim isolates reference-frame effects from aiming noise.
    """
    chest = np.array([0.0, 0.0, -volume.depth / 2.0 - STANCE_M])
    hand = chest + np.array([0.0, 0.0, HAND_REACH_M])
    head = chest + np.array([0.0, 0.35, 0.0])
    return Pose(head=head, hand=hand, device_orientation=aim_orientation(hand, aim_at))


def _grid_scene(board: BoardSpec) -> Tuple[Aabb, ...]:
    """One probe cube per cell; ids encode the cell so hits identify (col, row)."""
    edge = 0.75 * board.cell_size
    boxes = []
    for col, row in board.all_cells:
        center = board.cell_center((col, row)) + np.array([0.0, edge / 2.0, 0.0])
        boxes.append(Aabb.cube(row * board.columns + col, center, edge))
    return tuple(boxes)


def _transformed_boxes(boxes: Sequence[Aabb], transform) -> Tuple[Aabb, ...]:
    # Sign-flip maps keep boxes axis-aligned; transform corners and re-span.
    out = []
    for b in boxes:
        lo = transform.apply_point(b.lo)
        hi = transform.apply_point(b.hi)
        out.append(Aabb(b.id, np.minimum(lo, hi), np.maximum(lo, hi)))
    return tuple(out)


def _nearest_to_ray(origin, direction, boxes: Sequence[Aabb]) -> Optional[int]:
    """Id of the box whose center passes closest to the forward ray line."""
    if not boxes:
        return None
    o = np.asarray(origin, float)
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    best_id, best_dist = None, math.inf
    for b in sorted(boxes, key=lambda b: b.id):
        rel = (b.lo + b.hi) / 2.0 - o
        along = max(float(np.dot(rel, d)), 0.0)
        dist = float(np.linalg.norm(rel - along * d))
        if dist < best_dist:
            best_id, best_dist = b.id, dist
    return best_id


def _pointed_cube(origin, direction, boxes: Sequence[Aabb]) -> Optional[int]:
    """The cube a board-directed ray denotes: nearest center to where the ray
    lands on the cube-center plane.

    Intersection with probe cubes would make the answer depend on the probe
    edge and on half-cell offsets (a mirror does not map an off-center grid
    onto itself); the landing point keeps the outcome a pure function of the
    glue transforms' sign structure.  On a centered board this agrees with
    the strict nearest-intersection resolve for every cell.
    """
    if not boxes:
        return None
    o = np.asarray(origin, float)
    d = np.asarray(direction, float)
    centers = {b.id: (b.lo + b.hi) / 2.0 for b in boxes}
    # Land on the top-face plane, where the synthesized rays aim.
    plane_y = max(float(b.hi[1]) for b in boxes)
    if abs(d[1]) < 1e-12:
        return _nearest_to_ray(o, d, boxes)
    t = (plane_y - o[1]) / d[1]
    if t <= 0.0:
        return _nearest_to_ray(o, d, boxes)
    land = o + t * d
    best_id, best_dist = None, math.inf
    for cid in sorted(centers):
        c = centers[cid]
        dist = (c[0] - land[0]) ** 2 + (c[2] - land[2]) ** 2
        if dist < best_dist:
            best_id, best_dist = cid, dist
    return best_id


def _visible_face(eye, center, normals, half_edge: float) -> int:
    """Index of the face whose outward normal wins the visibility test."""
    to_eye = np.asarray(eye, float) - np.asarray(center, float)
    to_eye = to_eye / np.linalg.norm(to_eye)
    scores = [float(np.dot(n, to_eye)) for n in normals]
    return int(np.argmax(scores))


_FACE_NORMALS = tuple(np.array(n, dtype=float) for n in
                      [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])


def channel_report(cond: ConditionSpec, volume: WorkspaceVolume,
                   board: BoardSpec) -> ChannelMatchReport:
    """Brute-force the five awareness cells for one condition.

    For every cell, an instructor pose is synthesized whose ray hits that
    cell's probe cube in the canonical frame; the embodiment glue is applied
    to the ray and the workspace glue to the board, and the rendered ray is
    resolved again against the rendered board to find the cube it denotes.
    Pointing matches when the denoted cube agrees in column (or row) with
    the intent at every single cell.
    """
    workspace_map = glue_transform(cond, GlueEntity.WORKSPACE)
    embodiment_map = glue_transform(cond, GlueEntity.EMBODIMENT)
    boxes = _grid_scene(board)
    rendered_boxes = _transformed_boxes(boxes, workspace_map)
    edge = 0.75 * board.cell_size

    lateral_ok = True
    depth_ok = True
    for col, row in board.all_cells:
        aim = board.cell_center((col, row)) + np.array([0.0, edge, 0.0])  # top center
        pose = synthesize_instructor_pose(volume, aim)
        direction = pose.ray_direction
        canonical = raycast(pose.hand, direction, boxes)
        if canonical is None or canonical.cube_id != row * board.columns + col:
            raise NegspaceError(
                f"pose synthesis failed to hit cell ({col}, {row}); "
                "board geometry incompatible with the instructor stance")
        hit_id = _pointed_cube(embodiment_map.apply_point(pose.hand),
                               embodiment_map.apply_dir(direction), rendered_boxes)
        hit_col = hit_id % board.columns
        hit_row = hit_id // board.columns
        lateral_ok &= hit_col == col
        depth_ok &= hit_row == row

    # Verbal directions: compare the column order along each viewer's screen-right
    # and the row order along each viewer's away-from-me axis.
    instructor_right = volume.screen_plane(Role.INSTRUCTOR).right
    assembler_right = volume.screen_plane(Role.ASSEMBLER).right
    mid_row = board.rows // 2
    mid_col = board.columns // 2
    col_markers = [board.cell_center((c, mid_row)) for c in range(board.columns)]
    row_markers = [board.cell_center((mid_col, r)) for r in range(board.rows)]

    def ordering(points, axis) -> Tuple[int, ...]:
        keys = [float(np.dot(p, axis)) for p in points]
        return tuple(int(i) for i in np.argsort(keys, kind="stable"))

    cols_instructor = ordering(col_markers, instructor_right)
    cols_assembler = ordering([workspace_map.apply_point(p) for p in col_markers],
                              assembler_right)
    away_instructor = np.array([0.0, 0.0, 1.0])
    away_assembler = np.array([0.0, 0.0, -1.0])
    rows_instructor = ordering(row_markers, away_instructor)
    rows_assembler = ordering([workspace_map.apply_point(p) for p in row_markers],
                              away_assembler)

    # Shared visible face of a probe cube at the board center.
    center = board.cell_center(board.center_cell) + np.array([0.0, edge / 2.0, 0.0])
    eye_i = volume.default_eye(Role.INSTRUCTOR, STANCE_M)
    eye_a = volume.default_eye(Role.ASSEMBLER, STANCE_M)
    face_i = _visible_face(eye_i, center, _FACE_NORMALS, edge / 2.0)
    rendered_center = workspace_map.apply_point(center)
    rendered_normals = [workspace_map.apply_dir(n) for n in _FACE_NORMALS]
    face_a = _visible_face(eye_a, rendered_center, rendered_normals, edge / 2.0)

    return ChannelMatchReport(
        condition=cond,
        lateral_pointing=ChannelMatch.of(lateral_ok),
        depth_pointing=ChannelMatch.of(depth_ok),
        lateral_verbal=ChannelMatch.of(cols_instructor == cols_assembler),
        depth_verbal=ChannelMatch.of(rows_instructor == rows_assembler),
        shared_visible_face=face_i == face_a,
    )


def design_space_matrix(volume: WorkspaceVolume,
                        board: BoardSpec) -> Tuple[ChannelMatchReport, ...]:
    """One report per (pov, embodiment, workspace) triple; eight in total."""
    return tuple(channel_report(cond, volume, board)
                 for cond in ConditionSpec.all_conditions())


def format_matrix(reports: Sequence[ChannelMatchReport]) -> str:
    headers = ["Condition", "POV", "Embodiment", "Workspace",
               "LatPoint", "DepthPoint", "LatVerbal", "DepthVerbal", "SharedFace"]
    rows = []
    for r in reports:
        c = r.condition
        rows.append([
            c.name or "-", c.pov.value, c.embodiment.value, c.workspace.value,
            r.lateral_pointing.value, r.depth_pointing.value,
            r.lateral_verbal.value, r.depth_verbal.value,
            "yes" if r.shared_visible_face else "no",
        ])
    widths = [max(len(row[i]) for row in [headers] + rows) for i in range(len(headers))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip(),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
              for row in rows]
    return "\n".join(lines)


def matrix_to_doc(reports: Sequence[ChannelMatchReport]) -> list:
    return [{
        "name": r.condition.name,
        "pov": r.condition.pov.value,
        "embodiment": r.condition.embodiment.value,
        "workspace": r.condition.workspace.value,
        "lateral_pointing": r.lateral_pointing.value,
        "depth_pointing": r.depth_pointing.value,
        "lateral_verbal": r.lateral_verbal.value,
        "depth_verbal": r.depth_verbal.value,
        "shared_visible_face": r.shared_visible_face,
    } for r in reports]


# ---------------------------------------------------------------------------
# Pointing ambiguity (the occlusion problem under opposing viewpoints)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmbiguityReport:
    eye: Tuple[float, float, float]
    ray_origin: Tuple[float, float, float]
    ray_direction: Tuple[float, float, float]
    candidates: Tuple[Tuple[int, float], ...]  # (cube id, angle) ascending
    threshold: float

    @property
    def ambiguous(self) -> bool:
        if len(self.candidates) < 2:
            return False
        return (self.candidates[1][1] - self.candidates[0][1]) < self.threshold


def angular_offset_from_ray(eye, origin, direction, point) -> float:
    """Angle, seen from `eye`, between `point` and the nearest visual position
    of the ray origin + t*direction (t >= 0).

    The ray's image from the eye is a great-circle arc running from the
    direction of its origin toward its direction vector; the offset is the
    angular distance from the point's direction to that arc.
    """
    eye = np.asarray(eye, float)
    c = np.asarray(point, float) - eye
    nc = np.linalg.norm(c)
    if nc < 1e-12:
        return 0.0
    c = c / nc
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    u0 = np.asarray(origin, float) - eye
    n0 = np.linalg.norm(u0)
    if n0 < 1e-12:
        return _angle(c, d)
    u0 = u0 / n0
    plane = np.cross(u0, d)
    span = np.linalg.norm(plane)
    if span < 1e-12:
        if float(np.dot(u0, d)) > 0.0:
            return _angle(c, d)
        # ray passes through the eye; its image is the two antipodal directions
        return min(_angle(c, u0), _angle(c, d))
    plane = plane / span
    arc = _angle(u0, d)
    in_plane = c - float(np.dot(c, plane)) * plane
    norm_in_plane = np.linalg.norm(in_plane)
    if norm_in_plane < 1e-12:
        return math.pi / 2.0
    in_plane = in_plane / norm_in_plane
    if _angle(u0, in_plane) <= arc + 1e-12 and _angle(in_plane, d) <= arc + 1e-12:
        return math.asin(min(1.0, abs(float(np.dot(c, plane)))))
    return min(_angle(c, u0), _angle(c, d))


def _angle(a, b) -> float:
    return math.acos(float(np.clip(np.dot(a, b), -1.0, 1.0)))


def ambiguity_report(eye, hand, orientation, board: BoardState,
                     threshold: float = DEFAULT_ANGLE_THRESHOLD) -> AmbiguityReport:
    """Rank the board's cubes by angular proximity to the pointing ray as seen
    from `eye`; the report is ambiguous when the two best are within threshold."""
    q = require_unit_quaternion(orientation)
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    direction = quat_rotate(q, POINTER_FORWARD)
    ranked = []
    for box in board.scene_boxes():
        center = (box.lo + box.hi) / 2.0
        ranked.append((box.id, angular_offset_from_ray(eye, hand, direction, center)))
    ranked.sort(key=lambda item: (item[1], item[0]))
    eye = np.asarray(eye, float)
    hand = np.asarray(hand, float)
    return AmbiguityReport(
        eye=tuple(float(x) for x in eye),
        ray_origin=tuple(float(x) for x in hand),
        ray_direction=tuple(float(x) for x in direction),
        candidates=tuple((cid, float(a)) for cid, a in ranked),
        threshold=float(threshold),
    )
