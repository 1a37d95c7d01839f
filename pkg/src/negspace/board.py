"""Checkerboard workspace: cubes, single-selection pick-and-drop, shared highlight.

All operations return a new state and never mutate their input; a rejected
operation raises and leaves the caller's state untouched.  One authoritative
owner applies mutations in arrival order and replicates them as deltas.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import NegspaceError
from .geometry import Aabb, Role, WorkspaceVolume

Cell = Tuple[int, int]  # (col, row); col runs along +x, row along +z


class BoardError(NegspaceError):
    pass


class UnknownCube(BoardError):
    pass


class AlreadyHolding(BoardError):
    pass


class NothingSelected(BoardError):
    pass


class NothingHeld(BoardError):
    pass


class CellOccupied(BoardError):
    pass


class OutOfBounds(BoardError):
    pass


class CubeColor(IntEnum):
    RED = 0
    GREEN = 1
    BLUE = 2
    YELLOW = 3
    PURPLE = 4
    GRAY = 255  # neutral rendering for the assembler, never a true cube color


PALETTE = (CubeColor.RED, CubeColor.GREEN, CubeColor.BLUE,
           CubeColor.YELLOW, CubeColor.PURPLE)

DEFAULT_COLUMNS = 8
DEFAULT_ROWS = 5
DEFAULT_CELL_M = 0.08
DEFAULT_CUBE_EDGE_M = 0.06


@dataclass(frozen=True)
class BoardSpec:
    """Grid geometry.  `origin` is the 3D center of cell (0, 0) on the volume floor."""

    columns: int = DEFAULT_COLUMNS
    rows: int = DEFAULT_ROWS
    cell_size: float = DEFAULT_CELL_M
    origin: Tuple[float, float, float] = (
        -(DEFAULT_COLUMNS - 1) / 2.0 * DEFAULT_CELL_M,
        -1.2175910253629953 / 2.0,
        -(DEFAULT_ROWS - 1) / 2.0 * DEFAULT_CELL_M,
    )

    def __post_init__(self):
        if self.columns < 3 or self.rows < 3:
            raise ValueError("board needs at least 3 columns and 3 rows")
        if self.cell_size <= 0:
            raise ValueError("cell size must be positive")

    @classmethod
    def centered_on(cls, volume: WorkspaceVolume, columns: int = DEFAULT_COLUMNS,
                    rows: int = DEFAULT_ROWS, cell_size: float = DEFAULT_CELL_M) -> "BoardSpec":
        """Board centered on the volume floor; footprint must fit the volume."""
        if columns * cell_size > volume.width or rows * cell_size > volume.depth:
            raise ValueError("board footprint exceeds the workspace volume")
        origin = (-(columns - 1) / 2.0 * cell_size, volume.floor_y,
                  -(rows - 1) / 2.0 * cell_size)
        return cls(columns=columns, rows=rows, cell_size=cell_size, origin=origin)

    def in_bounds(self, cell: Cell) -> bool:
        col, row = cell
        return 0 <= col < self.columns and 0 <= row < self.rows

    def cell_center(self, cell: Cell) -> np.ndarray:
        col, row = cell
        ox, oy, oz = self.origin
        return np.array([ox + col * self.cell_size, oy, oz + row * self.cell_size])

    def cell_at(self, point) -> Optional[Cell]:
        """Grid cell under a 3D point (y ignored), or None when off the board."""
        p = np.asarray(point, dtype=float)
        ox, _, oz = self.origin
        col = round((p[0] - ox) / self.cell_size)
        row = round((p[2] - oz) / self.cell_size)
        cell = (int(col), int(row))
        return cell if self.in_bounds(cell) else None

    @property
    def all_cells(self) -> Tuple[Cell, ...]:
        return tuple((c, r) for r in range(self.rows) for c in range(self.columns))

    @property
    def corners(self) -> Tuple[Cell, Cell, Cell, Cell]:
        return ((0, 0), (self.columns - 1, 0),
                (0, self.rows - 1), (self.columns - 1, self.rows - 1))

    @property
    def center_cell(self) -> Cell:
        return (self.columns // 2, self.rows // 2)


@dataclass(frozen=True)
class Cube:
    """One puzzle cube.  `cell` is None while the cube is held off the grid."""

    id: int
    color: CubeColor
    cell: Optional[Cell]
    edge: float = DEFAULT_CUBE_EDGE_M


@dataclass(frozen=True)
class BoardState:
    spec: BoardSpec
    cubes: Tuple[Cube, ...]
    selection: Optional[int] = None
    held: Optional[int] = None
    highlight: Optional[int] = None

    def __post_init__(self):
        ids = [c.id for c in self.cubes]
        if len(set(ids)) != len(ids):
            raise ValueError("cube ids must be unique")
        colors = [c.color for c in self.cubes]
        if len(set(colors)) != len(colors):
            raise ValueError("cube colors must be pairwise distinct")
        occupied = [c.cell for c in self.cubes if c.cell is not None]
        if len(set(occupied)) != len(occupied):
            raise ValueError("two cubes share a cell")
        for cell in occupied:
            if not self.spec.in_bounds(cell):
                raise ValueError(f"cube cell out of bounds: {cell}")
        if self.held is not None and self.selection != self.held:
            raise ValueError("a held cube must be the selected cube")
        for ref in (self.selection, self.held, self.highlight):
            if ref is not None and ref not in ids:
                raise ValueError(f"dangling cube reference: {ref}")

    def cube(self, cube_id: int) -> Cube:
        for c in self.cubes:
            if c.id == cube_id:
                return c
        raise UnknownCube(f"no cube with id {cube_id}")

    def cube_at(self, cell: Cell) -> Optional[Cube]:
        for c in self.cubes:
            if c.cell == cell:
                return c
        return None

    @property
    def idle(self) -> bool:
        return self.selection is None and self.held is None

    def scene_boxes(self) -> Tuple[Aabb, ...]:
        """Axis-aligned boxes of the on-grid cubes, resting on the board plane."""
        boxes = []
        for c in self.cubes:
            if c.cell is None:
                continue
            center = self.spec.cell_center(c.cell) + np.array([0.0, c.edge / 2.0, 0.0])
            boxes.append(Aabb.cube(c.id, center, c.edge))
        return tuple(boxes)

    def _with_cube(self, cube: Cube, **changes) -> "BoardState":
        cubes = tuple(cube if c.id == cube.id else c for c in self.cubes)
        return replace(self, cubes=cubes, **changes)


def initial_board(spec: BoardSpec, placements: Sequence[Tuple[int, Cell]],
                  colors: Sequence[CubeColor] = PALETTE,
                  edge: float = DEFAULT_CUBE_EDGE_M) -> BoardState:
    """Board with the five cubes placed per (cube id, cell) pairs."""
    if len(placements) != len(colors):
        raise ValueError("need exactly one placement per color")
    cubes = tuple(Cube(id=cid, color=colors[i], cell=tuple(cell), edge=edge)
                  for i, (cid, cell) in enumerate(placements))
    return BoardState(spec=spec, cubes=cubes)


def render_view(state: BoardState, role: Role):
    """Displayed colors per role: true colors for the instructor, neutral gray
    for the assembler (color identity is the instructor's private knowledge)."""
    if role is Role.INSTRUCTOR:
        return [(c.id, c.color) for c in state.cubes]
    return [(c.id, CubeColor.GRAY) for c in state.cubes]


def select(state: BoardState, cube_id: int) -> BoardState:
    """Point at a cube: it becomes the selection and the shared highlight."""
    if state.held is not None:
        raise AlreadyHolding(f"cannot select while holding cube {state.held}")
    state.cube(cube_id)  # raises UnknownCube
    return replace(state, selection=cube_id, highlight=cube_id)


def deselect(state: BoardState) -> BoardState:
    if state.held is not None:
        raise AlreadyHolding("cannot deselect while holding")
    return replace(state, selection=None, highlight=None)


def pick(state: BoardState) -> BoardState:
    """Lift the selected cube off the grid, freeing its cell."""
    if state.held is not None:
        raise AlreadyHolding(f"already holding cube {state.held}")
    if state.selection is None:
        raise NothingSelected("no cube selected")
    cube = state.cube(state.selection)
    return state._with_cube(replace(cube, cell=None), held=cube.id)


def drop(state: BoardState, cell: Cell) -> BoardState:
    """Place the held cube on a free in-bounds cell; clears selection and highlight."""
    if state.held is None:
        raise NothingHeld("no cube held")
    cell = (int(cell[0]), int(cell[1]))
    if not state.spec.in_bounds(cell):
        raise OutOfBounds(f"cell {cell} is outside the board")
    if state.cube_at(cell) is not None:
        raise CellOccupied(f"cell {cell} already holds a cube")
    cube = state.cube(state.held)
    return state._with_cube(replace(cube, cell=cell),
                            held=None, selection=None, highlight=None)
