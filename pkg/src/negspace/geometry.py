"""Shared-volume geometry for two displays glued into one tunnel workspace.

The canonical frame has its origin at the volume center, +x pointing to the
instructor's right, +y up, and +z running from the instructor's display to
the assembler's display.  The instructor plane sits at z = -depth/2, the
assembler plane at z = +depth/2.  Everything downstream (board, awareness,
replication payloads) is expressed in this frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import NegspaceError

INCH_M = 0.0254

DEFAULT_DIAGONAL_M = 55.0 * INCH_M
DEFAULT_ASPECT = (9.0, 16.0)  # portrait: width 9, height 16
DEFAULT_DEPTH_M = 0.5

# Device-frame forward vector of the handheld pointer.  With the identity
# orientation a pointer held by the assembler aims back down the tunnel.
POINTER_FORWARD = np.array([0.0, 0.0, -1.0])

_ORTHO_TOL_RAD = 1e-6
_PLANE_TOL_M = 1e-6
_QUAT_TOL = 1e-6


class NonPositiveDepth(NegspaceError):
    pass


class DegeneratePlane(NegspaceError):
    pass


class EyeInScreenPlane(NegspaceError):
    pass


class BadClipRange(NegspaceError):
    pass


class NonUnitQuaternion(NegspaceError):
    pass


class ParallelLine(NegspaceError):
    pass


def _vec3(value) -> np.ndarray:
    v = np.asarray(value, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    return v


# ---------------------------------------------------------------------------
# Quaternions (x, y, z, w), used for pointer orientations.
# ---------------------------------------------------------------------------

def quat_norm(q) -> float:
    return float(np.linalg.norm(np.asarray(q, dtype=float)))


def require_unit_quaternion(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise NonUnitQuaternion(f"quaternion must have 4 components, got {q.shape}")
    if abs(quat_norm(q) - 1.0) > _QUAT_TOL:
        raise NonUnitQuaternion(f"|q| = {quat_norm(q):.9f}, expected 1 within {_QUAT_TOL}")
    return q


def quat_rotate(q, v) -> np.ndarray:
    """Rotate vector v by unit quaternion q = (x, y, z, w)."""
    q = np.asarray(q, dtype=float)
    v = _vec3(v)
    u, w = q[:3], q[3]
    # v' = v + 2 u x (u x v + w v)
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)


def quat_between(a, b) -> np.ndarray:
    """Unit quaternion rotating direction a onto direction b."""
    a = _vec3(a) / np.linalg.norm(a)
    b = _vec3(b) / np.linalg.norm(b)
    d = float(np.dot(a, b))
    if d < -1.0 + 1e-12:
        # 180 degrees: rotate about any axis orthogonal to a
        axis = np.cross(a, np.array([1.0, 0.0, 0.0]))
        if np.linalg.norm(axis) < 1e-9:
            axis = np.cross(a, np.array([0.0, 1.0, 0.0]))
        axis /= np.linalg.norm(axis)
        return np.array([axis[0], axis[1], axis[2], 0.0])
    u = np.cross(a, b)
    q = np.array([u[0], u[1], u[2], 1.0 + d])
    return q / np.linalg.norm(q)


def aim_orientation(origin, at) -> np.ndarray:
    """Pointer orientation whose ray from `origin` passes through `at`."""
    return quat_between(POINTER_FORWARD, _vec3(at) - _vec3(origin))


# ---------------------------------------------------------------------------
# Display planes and the workspace volume
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DisplayPlane:
    """Rectangular screen given by three corners, in meters.

    Corner labels are as seen by the person watching this screen, so
    ``right`` is the direction that must appear rightward on the rendered
    image and ``up`` the direction that must appear upward.
    """

    lower_left: np.ndarray
    lower_right: np.ndarray
    upper_left: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower_left", _vec3(self.lower_left))
        object.__setattr__(self, "lower_right", _vec3(self.lower_right))
        object.__setattr__(self, "upper_left", _vec3(self.upper_left))
        w = np.linalg.norm(self.lower_right - self.lower_left)
        h = np.linalg.norm(self.upper_left - self.lower_left)
        if w <= 0.0 or h <= 0.0:
            raise DegeneratePlane("plane has zero width or height")
        u = (self.lower_right - self.lower_left) / w
        v = (self.upper_left - self.lower_left) / h
        cos_angle = float(np.clip(np.dot(u, v), -1.0, 1.0))
        if abs(math.acos(cos_angle) - math.pi / 2.0) > _ORTHO_TOL_RAD:
            raise DegeneratePlane("corner edges are not orthogonal")

    @classmethod
    def from_size(cls, width: float, height: float, center=(0.0, 0.0, 0.0),
                  right=(1.0, 0.0, 0.0), up=(0.0, 1.0, 0.0)) -> "DisplayPlane":
        c, r, u = _vec3(center), _vec3(right), _vec3(up)
        r = r / np.linalg.norm(r)
        u = u / np.linalg.norm(u)
        ll = c - r * (width / 2.0) - u * (height / 2.0)
        return cls(ll, ll + r * width, ll + u * height)

    @classmethod
    def from_diagonal(cls, diagonal_m: float = DEFAULT_DIAGONAL_M,
                      aspect: tuple = DEFAULT_ASPECT, **kwargs) -> "DisplayPlane":
        """Plane sized from a display diagonal and a width:height aspect."""
        aw, ah = float(aspect[0]), float(aspect[1])
        hyp = math.hypot(aw, ah)
        return cls.from_size(diagonal_m * aw / hyp, diagonal_m * ah / hyp, **kwargs)

    @property
    def width(self) -> float:
        return float(np.linalg.norm(self.lower_right - self.lower_left))

    @property
    def height(self) -> float:
        return float(np.linalg.norm(self.upper_left - self.lower_left))

    @property
    def right(self) -> np.ndarray:
        return (self.lower_right - self.lower_left) / self.width

    @property
    def up(self) -> np.ndarray:
        return (self.upper_left - self.lower_left) / self.height

    @property
    def normal(self) -> np.ndarray:
        """Algebraic unit normal right x up (sign carries no viewer meaning)."""
        n = np.cross(self.right, self.up)
        return n / np.linalg.norm(n)

    @property
    def upper_right(self) -> np.ndarray:
        return self.lower_right + (self.upper_left - self.lower_left)

    @property
    def center(self) -> np.ndarray:
        return (self.lower_left + self.upper_right) / 2.0

    def corners(self) -> np.ndarray:
        """All four corners, shape (4, 3): ll, lr, ul, ur."""
        return np.stack([self.lower_left, self.lower_right,
                         self.upper_left, self.upper_right])

    def point_at(self, u: float, v: float) -> np.ndarray:
        """World point at in-plane coordinates measured from the lower-left corner."""
        return self.lower_left + u * self.right + v * self.up

    def uv_of(self, point) -> tuple:
        d = _vec3(point) - self.lower_left
        return float(np.dot(d, self.right)), float(np.dot(d, self.up))

    def signed_distance(self, point) -> float:
        return float(np.dot(_vec3(point) - self.lower_left, self.normal))

    def translated(self, offset) -> "DisplayPlane":
        off = _vec3(offset)
        return DisplayPlane(self.lower_left + off, self.lower_right + off,
                            self.upper_left + off)

    def flipped_view(self) -> "DisplayPlane":
        """Same physical rectangle, corner labels for a viewer on the other side."""
        return DisplayPlane(self.lower_right, self.lower_left, self.upper_right)


class Role(Enum):
    INSTRUCTOR = "instructor"
    ASSEMBLER = "assembler"

    @property
    def other(self) -> "Role":
        return Role.ASSEMBLER if self is Role.INSTRUCTOR else Role.INSTRUCTOR


@dataclass(frozen=True, eq=False)
class WorkspaceVolume:
    """Tunnel between the two displays, expressed in the canonical frame.

    ``local_plane`` is the instructor's screen at z = -depth/2, labeled from
    the instructor's viewpoint; ``remote_plane`` is its translate at
    z = +depth/2.  Any point between the planes has distances to the two
    planes summing to exactly ``depth``.
    """

    depth: float
    local_plane: DisplayPlane
    remote_plane: DisplayPlane

    @property
    def width(self) -> float:
        return self.local_plane.width

    @property
    def height(self) -> float:
        return self.local_plane.height

    @property
    def floor_y(self) -> float:
        """Height of the volume's lower face, where the board rests."""
        return -self.height / 2.0

    def screen_plane(self, role: Role) -> DisplayPlane:
        """The screen a given role watches, corner-labeled from that viewpoint."""
        if role is Role.INSTRUCTOR:
            return self.local_plane
        return self.remote_plane.flipped_view()

    def default_eye(self, role: Role, stance_m: float = 1.0) -> np.ndarray:
        """Head position for a participant standing `stance_m` from their display."""
        z = self.depth / 2.0 + stance_m
        return np.array([0.0, 0.0, -z if role is Role.INSTRUCTOR else z])


def build_volume(local: DisplayPlane, depth: float) -> WorkspaceVolume:
    """Construct the canonical workspace volume from the instructor's display.

    Only the physical size of `local` is kept: the plane is re-seated at the
    canonical instructor position (center (0, 0, -depth/2), right +x, up +y)
    and the remote plane is that plane translated by `depth` along +z.
    """
    if not depth > 0.0:
        raise NonPositiveDepth(f"depth must be positive, got {depth}")
    seated = DisplayPlane.from_size(local.width, local.height,
                                    center=(0.0, 0.0, -depth / 2.0))
    remote = seated.translated(depth * np.array([0.0, 0.0, 1.0]))
    return WorkspaceVolume(depth=float(depth), local_plane=seated, remote_plane=remote)


def default_volume() -> WorkspaceVolume:
    """55-inch 9:16 portrait displays, 0.5 m apart."""
    return build_volume(DisplayPlane.from_diagonal(), DEFAULT_DEPTH_M)


# ---------------------------------------------------------------------------
# Conditions and glue transforms
# ---------------------------------------------------------------------------

class Pov(Enum):
    OPPOSING = "opposing"
    IDENTICAL = "identical"


class MirrorMode(Enum):
    EXACT = "exact"
    MIRRORED = "mirrored"


class GlueEntity(Enum):
    WORKSPACE = "workspace"
    EMBODIMENT = "embodiment"


@dataclass(frozen=True)
class ConditionSpec:
    """One point of the (pov, embodiment, workspace) design space.

    Four points carry study names: RL = (opposing, exact, exact),
    SS = (identical, exact, exact), MP = (identical, mirrored, exact),
    MW = (identical, exact, mirrored).
    """

    pov: Pov
    embodiment: MirrorMode
    workspace: MirrorMode

    _NAMES = {
        (Pov.OPPOSING, MirrorMode.EXACT, MirrorMode.EXACT): "RL",
        (Pov.IDENTICAL, MirrorMode.EXACT, MirrorMode.EXACT): "SS",
        (Pov.IDENTICAL, MirrorMode.MIRRORED, MirrorMode.EXACT): "MP",
        (Pov.IDENTICAL, MirrorMode.EXACT, MirrorMode.MIRRORED): "MW",
    }

    @property
    def name(self) -> Optional[str]:
        return self._NAMES.get((self.pov, self.embodiment, self.workspace))

    @property
    def label(self) -> str:
        tag = "+".join([
            "opp" if self.pov is Pov.OPPOSING else "ident",
            "embE" if self.embodiment is MirrorMode.EXACT else "embM",
            "wsE" if self.workspace is MirrorMode.EXACT else "wsM",
        ])
        return self.name or tag

    @property
    def code(self) -> int:
        """Wire encoding: bit0 identical pov, bit1 mirrored embodiment, bit2 mirrored workspace."""
        return ((self.pov is Pov.IDENTICAL)
                | (self.embodiment is MirrorMode.MIRRORED) << 1
                | (self.workspace is MirrorMode.MIRRORED) << 2)

    @classmethod
    def from_code(cls, code: int) -> "ConditionSpec":
        if not 0 <= code <= 7:
            raise ValueError(f"condition code out of range: {code}")
        return cls(pov=Pov.IDENTICAL if code & 1 else Pov.OPPOSING,
                   embodiment=MirrorMode.MIRRORED if code & 2 else MirrorMode.EXACT,
                   workspace=MirrorMode.MIRRORED if code & 4 else MirrorMode.EXACT)

    @classmethod
    def from_name(cls, name: str) -> "ConditionSpec":
        for triple, tag in cls._NAMES.items():
            if tag == name.upper():
                return cls(*triple)
        raise ValueError(f"unknown condition name: {name!r}")

    @classmethod
    def all_conditions(cls) -> tuple:
        """The full 8-point design space, named points first within enumeration order."""
        return tuple(cls(p, e, w) for p in Pov for e in MirrorMode for w in MirrorMode)


RL = ConditionSpec(Pov.OPPOSING, MirrorMode.EXACT, MirrorMode.EXACT)
SS = ConditionSpec(Pov.IDENTICAL, MirrorMode.EXACT, MirrorMode.EXACT)
MP = ConditionSpec(Pov.IDENTICAL, MirrorMode.MIRRORED, MirrorMode.EXACT)
MW = ConditionSpec(Pov.IDENTICAL, MirrorMode.EXACT, MirrorMode.MIRRORED)


@dataclass(frozen=True, eq=False)
class RigidMap:
    """4x4 homogeneous map restricted to products of identity, a 180-degree
    rotation about +y, and a mirror across the x = 0 plane."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"expected 4x4 matrix, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "RigidMap":
        return cls(np.eye(4))

    @classmethod
    def rotation_y_180(cls) -> "RigidMap":
        return cls(np.diag([-1.0, 1.0, -1.0, 1.0]))

    @classmethod
    def mirror_x(cls) -> "RigidMap":
        return cls(np.diag([-1.0, 1.0, 1.0, 1.0]))

    @property
    def linear(self) -> np.ndarray:
        return self.matrix[:3, :3]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    def compose(self, inner: "RigidMap") -> "RigidMap":
        """self after inner: (self.compose(inner))(p) = self(inner(p))."""
        return RigidMap(self.matrix @ inner.matrix)

    def inverse(self) -> "RigidMap":
        return RigidMap(np.linalg.inv(self.matrix))

    def apply_point(self, p) -> np.ndarray:
        q = self.matrix @ np.append(_vec3(p), 1.0)
        return q[:3] / q[3]

    def apply_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ self.linear.T + self.matrix[:3, 3]

    def apply_dir(self, d) -> np.ndarray:
        return self.linear @ _vec3(d)

    def is_identity(self, tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, np.eye(4), atol=tol))


def glue_transform(cond: ConditionSpec, entity: GlueEntity) -> RigidMap:
    """Transform applied on the assembler's renderer to an entity's canonical geometry.

    Opposing pov glues the rooms physically (identity on everything).
    Identical pov turns the workspace half a turn about the volume's vertical
    axis so the assembler sees the board exactly as the instructor does,
    while the embodiment stays put.  A mirrored entity composes a mirror
    across x = 0 after its base map.
    """
    if cond.pov is Pov.OPPOSING:
        base = RigidMap.identity()
    else:
        base = (RigidMap.rotation_y_180() if entity is GlueEntity.WORKSPACE
                else RigidMap.identity())
    mirrored = (cond.workspace if entity is GlueEntity.WORKSPACE else cond.embodiment)
    if mirrored is MirrorMode.MIRRORED:
        return RigidMap.mirror_x().compose(base)
    return base


# ---------------------------------------------------------------------------
# Head-coupled off-axis projection
# ---------------------------------------------------------------------------

def projection_matrix(eye, screen: DisplayPlane, near: float, far: float) -> np.ndarray:
    """Off-axis perspective matrix whose image rectangle is exactly `screen`.

    Parameters
    ----------
    eye : 3-vector
        Viewer head position, strictly off the screen plane.
    screen : DisplayPlane
        Physical screen; its corner labels fix the image orientation.
    near, far : float
        Clip distances along the view depth axis, 0 < near < far.

    Returns
    -------
    numpy.ndarray
        Row-major 4x4 matrix.  For a world point p, clip = M @ (p, 1) and
        NDC = clip[:3] / clip[3]; each screen corner lands on |x| = |y| = 1,
        and any point in the screen plane keeps its NDC position under head
        motion (motion parallax leaves the screen surface fixed).
    """
    eye = _vec3(eye)
    if not (0.0 < near < far):
        raise BadClipRange(f"need 0 < near < far, got near={near}, far={far}")
    h = float(np.dot(screen.normal, eye - screen.lower_left))
    if abs(h) < _PLANE_TOL_M:
        raise EyeInScreenPlane("eye lies (nearly) in the screen plane")
    vr, vu = screen.right, screen.up
    toward = -screen.normal * math.copysign(1.0, h)  # from eye toward the plane
    d = abs(h)

    # Screen rectangle relative to the eye's perpendicular foot, in plane units.
    left = float(np.dot(screen.lower_left - eye, vr))
    right = left + screen.width
    bottom = float(np.dot(screen.lower_left - eye, vu))
    top = bottom + screen.height

    view = np.eye(4)
    view[0, :3], view[0, 3] = vr, -np.dot(vr, eye)
    view[1, :3], view[1, 3] = vu, -np.dot(vu, eye)
    view[2, :3], view[2, 3] = toward, -np.dot(toward, eye)

    frustum = np.zeros((4, 4))
    frustum[0, 0] = 2.0 * d / (right - left)
    frustum[0, 2] = -(right + left) / (right - left)
    frustum[1, 1] = 2.0 * d / (top - bottom)
    frustum[1, 2] = -(top + bottom) / (top - bottom)
    frustum[2, 2] = (far + near) / (far - near)
    frustum[2, 3] = -2.0 * far * near / (far - near)
    frustum[3, 2] = 1.0
    return frustum @ view


def project_point(matrix: np.ndarray, p) -> np.ndarray:
    """Apply a projection matrix and divide: world point -> NDC 3-vector."""
    clip = matrix @ np.append(_vec3(p), 1.0)
    if abs(clip[3]) < 1e-15:
        raise ParallelLine("point projects to infinity (zero w)")
    return clip[:3] / clip[3]


# ---------------------------------------------------------------------------
# Ray casting
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Aabb:
    """Axis-aligned box with an application-level id (a cube, typically)."""

    id: int
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", _vec3(self.lo))
        object.__setattr__(self, "hi", _vec3(self.hi))
        if np.any(self.hi < self.lo):
            raise ValueError("box hi must be >= lo componentwise")

    @classmethod
    def cube(cls, id: int, center, edge: float) -> "Aabb":
        c, half = _vec3(center), edge / 2.0
        return cls(id, c - half, c + half)


@dataclass(frozen=True, eq=False)
class RayHit:
    cube_id: int
    point: np.ndarray
    distance: float


def raycast(origin, direction, boxes: Sequence[Aabb]) -> Optional[RayHit]:
    """Nearest box hit by the ray, by entry distance; None if nothing is hit.

    A ray starting inside a box hits it at distance zero.  Direction need not
    be unit length; distances are in units of its length.
    """
    if not boxes:
        return None
    o, d = _vec3(origin), _vec3(direction)
    lo = np.stack([b.lo for b in boxes])
    hi = np.stack([b.hi for b in boxes])
    parallel = np.abs(d) < 1e-15
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (lo - o) / d
        t2 = (hi - o) / d
    near = np.where(parallel, -np.inf, np.minimum(t1, t2))
    far = np.where(parallel, np.inf, np.maximum(t1, t2))
    t_enter = near.max(axis=1)
    t_exit = far.min(axis=1)
    outside_slab = parallel & ((o < lo) | (o > hi))
    miss = outside_slab.any(axis=1) | (t_exit < np.maximum(t_enter, 0.0))
    dist = np.where(miss, np.inf, np.maximum(t_enter, 0.0))
    best = int(np.argmin(dist))
    if not np.isfinite(dist[best]):
        return None
    return RayHit(cube_id=boxes[best].id, point=o + dist[best] * d,
                  distance=float(dist[best]))


@dataclass(frozen=True, eq=False)
class Pose:
    """Tracked participant sample: head and hand positions plus pointer orientation."""

    head: np.ndarray
    hand: np.ndarray
    device_orientation: np.ndarray  # unit quaternion (x, y, z, w)

    def __post_init__(self):
        object.__setattr__(self, "head", _vec3(self.head))
        object.__setattr__(self, "hand", _vec3(self.hand))
        object.__setattr__(self, "device_orientation",
                           require_unit_quaternion(self.device_orientation))

    @property
    def ray_direction(self) -> np.ndarray:
        return quat_rotate(self.device_orientation, POINTER_FORWARD)


def resolve_ray(hand, orientation, scene: Sequence[Aabb]) -> Optional[RayHit]:
    """Laser pointing: cast the oriented device ray from the hand into the scene."""
    q = require_unit_quaternion(orientation)
    return raycast(hand, quat_rotate(q, POINTER_FORWARD), scene)


# ---------------------------------------------------------------------------
# Head-coupled screen cursor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CursorPoint:
    """Cursor position in a screen's (u, v) basis, measured from its lower-left
    corner in meters.  `on_screen` is False when the intersection falls outside
    the physical rectangle; that is reported, not fatal."""

    u: float
    v: float
    on_screen: bool


def cursor_on_screen(head, target, screen: DisplayPlane) -> CursorPoint:
    """Where the head-to-target line pierces the screen.

    Placing the cursor there makes it visually overlay the target from the
    head's viewpoint, which is what ties pointing on the screen surface to
    locations inside the volume.
    """
    head, target = _vec3(head), _vec3(target)
    direction = target - head
    n = screen.normal
    denom = float(np.dot(direction, n))
    if abs(denom) < 1e-12 * max(1.0, float(np.linalg.norm(direction))):
        raise ParallelLine("head-to-target line is parallel to the screen plane")
    t = float(np.dot(screen.lower_left - head, n)) / denom
    hit = head + t * direction
    u, v = screen.uv_of(hit)
    on_screen = (0.0 <= u <= screen.width) and (0.0 <= v <= screen.height)
    return CursorPoint(u=u, v=v, on_screen=on_screen)
