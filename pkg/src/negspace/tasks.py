"""Puzzle generation under a fixed rule set, step judging, and session metrics.

A puzzle starts with one cube pre-placed on the canonical start cell and the
other four on the board corners.  The solution is an ordered list of four
moves growing a connected cluster around the start cube; every puzzle built
from the same rule set carries the same complexity certificate, which is what
makes tasks comparable.
"""

from __future__ import annotations

import datetime as _dt
import json
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .board import BoardSpec, Cell, initial_board, BoardState
from .errors import NegspaceError

CUBE_IDS = (0, 1, 2, 3, 4)
TRAINING_SEED = 999983  # reserved; session seeds must avoid it


class Unsatisfiable(NegspaceError):
    pass


class MalformedLog(NegspaceError):
    pass


class EmptyGroup(NegspaceError):
    pass


def manhattan(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def adjacent(a: Cell, b: Cell) -> bool:
    return manhattan(a, b) == 1


@dataclass(frozen=True)
class RuleSet:
    """Constraints every generated puzzle must satisfy.

    `total_distance` fixes the summed Manhattan distance from each moved
    cube's corner to its solution target, which pins puzzle complexity to a
    single comparable number.
    """

    total_distance: int = 20
    min_step_distance: int = 0
    start_cell: Optional[Cell] = None  # None: board center

    def resolved_start(self, board: BoardSpec) -> Cell:
        return self.start_cell if self.start_cell is not None else board.center_cell


@dataclass(frozen=True)
class ComplexityCertificate:
    total_distance: int
    adjacency: Tuple[bool, bool, bool, bool]


@dataclass(frozen=True)
class SolutionStep:
    cube_id: int
    target: Cell


@dataclass(frozen=True)
class PuzzleSpec:
    id: int
    initial: Tuple[int, Cell]                  # pre-placed cube and its cell
    starts: Tuple[Tuple[int, Cell], ...]       # the four movable cubes on corners
    solution: Tuple[SolutionStep, ...]
    complexity: ComplexityCertificate

    def __post_init__(self):
        if len(self.starts) != 4 or len(self.solution) != 4:
            raise ValueError("a puzzle has exactly four movable cubes and four steps")

    @property
    def start_map(self) -> Dict[int, Cell]:
        return dict(self.starts)

    def initial_placements(self) -> List[Tuple[int, Cell]]:
        """All five (cube id, cell) pairs for setting up the board."""
        return [self.initial, *self.starts]

    def initial_board_state(self, board: BoardSpec) -> BoardState:
        return initial_board(board, self.initial_placements())


def compute_certificate(puzzle_starts: Dict[int, Cell], initial_cell: Cell,
                        solution: Sequence[SolutionStep]) -> ComplexityCertificate:
    placed = [initial_cell]
    flags = []
    total = 0
    for step in solution:
        total += manhattan(puzzle_starts[step.cube_id], step.target)
        flags.append(any(adjacent(step.target, c) for c in placed))
        placed.append(step.target)
    return ComplexityCertificate(total_distance=total, adjacency=tuple(flags))


def generate_puzzle(seed: int, board: BoardSpec, rules: RuleSet = RuleSet()) -> PuzzleSpec:
    """Deterministic seeded search for a puzzle satisfying the rule set.

    The search backtracks over step orders and target cells with seeded
    shuffling, so equal seeds give identical puzzles and the full space is
    exhausted before declaring the rules unsatisfiable on this board.
    """
    rng = random.Random(("puzzle", seed).__repr__())
    start = rules.resolved_start(board)
    corners = list(board.corners)
    if not board.in_bounds(start) or start in corners:
        raise Unsatisfiable(f"start cell {start} unusable on this board")

    cube_ids = list(CUBE_IDS)
    rng.shuffle(cube_ids)
    initial_cube, movers = cube_ids[0], cube_ids[1:]
    corner_of = dict(zip(movers, corners))  # movers were shuffled; corners fixed order

    min_step = max(1, rules.min_step_distance)
    max_step = (board.columns - 1) + (board.rows - 1)

    def candidates(placed: List[Cell], remaining: List[int], budget: int):
        blocked = set(placed) | {corner_of[m] for m in remaining}
        cells = sorted({(c[0] + dc, c[1] + dr)
                        for c in placed for dc, dr in ((1, 0), (-1, 0), (0, 1), (0, -1))})
        steps_left = len(remaining)
        out = []
        for cube in remaining:
            for cell in cells:
                if not board.in_bounds(cell) or cell in blocked:
                    continue
                dist = manhattan(corner_of[cube], cell)
                if dist < min_step:
                    continue
                rest = budget - dist
                if rest < (steps_left - 1) * min_step or rest > (steps_left - 1) * max_step:
                    continue
                out.append((cube, cell, dist))
        rng.shuffle(out)
        return out

    def search(placed: List[Cell], remaining: List[int], budget: int,
               acc: List[SolutionStep]) -> Optional[List[SolutionStep]]:
        if not remaining:
            return list(acc) if budget == 0 else None
        for cube, cell, dist in candidates(placed, remaining, budget):
            acc.append(SolutionStep(cube_id=cube, target=cell))
            found = search(placed + [cell], [m for m in remaining if m != cube],
                           budget - dist, acc)
            if found is not None:
                return found
            acc.pop()
        return None

    solution = search([start], movers, rules.total_distance, [])
    if solution is None:
        raise Unsatisfiable(
            f"no puzzle satisfies total_distance={rules.total_distance}, "
            f"min_step_distance={rules.min_step_distance} on a "
            f"{board.columns}x{board.rows} board")
    starts = tuple(sorted(corner_of.items()))
    return PuzzleSpec(
        id=seed,
        initial=(initial_cube, start),
        starts=starts,
        solution=tuple(solution),
        complexity=compute_certificate(dict(starts), start, solution),
    )


@dataclass(frozen=True)
class RuleCheck:
    rule: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: Tuple[RuleCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[RuleCheck]:
        return [c for c in self.checks if not c.passed]


def validate_puzzle(puzzle: PuzzleSpec, board: BoardSpec,
                    rules: RuleSet = RuleSet()) -> ValidationReport:
    """Check every rule separately; two puzzles are equally complex iff their
    certificates compare equal."""
    checks = []
    start = rules.resolved_start(board)
    init_cube, init_cell = puzzle.initial
    checks.append(RuleCheck("initial-on-start-cell", init_cell == start,
                            f"initial at {init_cell}, start {start}"))
    start_cells = sorted(cell for _, cell in puzzle.starts)
    checks.append(RuleCheck("movers-on-corners", start_cells == sorted(board.corners),
                            f"movers at {start_cells}"))
    ids = {init_cube, *(cid for cid, _ in puzzle.starts)}
    checks.append(RuleCheck("five-distinct-cubes", ids == set(CUBE_IDS), f"ids {sorted(ids)}"))

    placed = [init_cell]
    adjacency_ok = True
    for step in puzzle.solution:
        if not any(adjacent(step.target, c) for c in placed):
            adjacency_ok = False
        placed.append(step.target)
    checks.append(RuleCheck("targets-adjacent-to-placed", adjacency_ok))

    targets = [s.target for s in puzzle.solution]
    checks.append(RuleCheck("targets-distinct", len(set(targets)) == len(targets)))
    checks.append(RuleCheck("targets-avoid-start-cell", init_cell not in targets))
    checks.append(RuleCheck("targets-in-bounds", all(board.in_bounds(t) for t in targets)))

    cert = compute_certificate(puzzle.start_map, init_cell, puzzle.solution)
    checks.append(RuleCheck("certificate-consistent", cert == puzzle.complexity,
                            f"recomputed {cert}"))
    checks.append(RuleCheck("total-distance-matches-rules",
                            cert.total_distance == rules.total_distance,
                            f"{cert.total_distance} vs {rules.total_distance}"))
    min_step = max(1, rules.min_step_distance)
    dists = [manhattan(puzzle.start_map[s.cube_id], s.target) for s in puzzle.solution]
    checks.append(RuleCheck("per-step-distance-floor", all(d >= min_step for d in dists),
                            f"step distances {dists}"))
    return ValidationReport(checks=tuple(checks))


# ---------------------------------------------------------------------------
# Session events, judging and metrics
# ---------------------------------------------------------------------------

class EventKind(Enum):
    TASK_START = "task_start"
    SELECT = "select"
    PICK = "pick"
    DROP = "drop"
    WRONG_SELECT = "wrong_select"
    WRONG_PLACE = "wrong_place"
    TASK_COMPLETE = "task_complete"


@dataclass(frozen=True)
class SessionEvent:
    time_s: float
    kind: EventKind
    cube_id: Optional[int] = None
    cell: Optional[Cell] = None
    condition: Optional[str] = None   # set on TASK_START
    wall_time: Optional[str] = None   # ISO-8601; synthetic epoch in simulation

    def to_json(self) -> str:
        doc = {"wall": self.wall_time or iso_wall_time(self.time_s),
               "t": round(self.time_s, 6), "kind": self.kind.value}
        if self.cube_id is not None:
            doc["cube"] = self.cube_id
        if self.cell is not None:
            doc["cell"] = list(self.cell)
        if self.condition is not None:
            doc["condition"] = self.condition
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "SessionEvent":
        doc = json.loads(line)
        cell = tuple(doc["cell"]) if "cell" in doc else None
        return cls(time_s=float(doc["t"]), kind=EventKind(doc["kind"]),
                   cube_id=doc.get("cube"), cell=cell,
                   condition=doc.get("condition"), wall_time=doc.get("wall"))


_SYNTHETIC_EPOCH = _dt.datetime(2000, 1, 1, tzinfo=_dt.timezone.utc)


def iso_wall_time(offset_s: float, epoch: Optional[_dt.datetime] = None) -> str:
    base = epoch if epoch is not None else _SYNTHETIC_EPOCH
    return (base + _dt.timedelta(seconds=offset_s)).isoformat().replace("+00:00", "Z")


def write_event_log(path, events: Iterable[SessionEvent]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(ev.to_json() + "\n")


def read_event_log(path) -> List[SessionEvent]:
    with open(path, encoding="utf-8") as fh:
        return [SessionEvent.from_json(line) for line in fh if line.strip()]


class Verdict(Enum):
    CORRECT = "correct"
    WRONG_SELECT = "wrong_select"
    WRONG_PLACE = "wrong_place"
    COMPLETE = "complete"


def judge_event(puzzle: PuzzleSpec, progress: int, event: SessionEvent) -> Verdict:
    """Judge a select or drop against the next solution step.

    `progress` counts correct placements so far; the fourth correct drop
    completes the task (callers emit the fade signal on COMPLETE).
    """
    if not 0 <= progress < 4:
        raise ValueError(f"progress must be in 0..3, got {progress}")
    step = puzzle.solution[progress]
    if event.kind is EventKind.SELECT:
        return Verdict.CORRECT if event.cube_id == step.cube_id else Verdict.WRONG_SELECT
    if event.kind is EventKind.DROP:
        if event.cube_id == step.cube_id and event.cell == step.target:
            return Verdict.COMPLETE if progress == 3 else Verdict.CORRECT
        return Verdict.WRONG_PLACE
    raise ValueError(f"judge_event only accepts select/drop, got {event.kind}")


@dataclass(frozen=True)
class MetricsRow:
    condition: str
    completion_time: float
    wrong_selections: int
    wrong_placements: int


def score_log(events: Sequence[SessionEvent]) -> MetricsRow:
    """Collapse one task's event log into its metrics row."""
    if not events:
        raise MalformedLog("empty event log")
    if events[0].kind is not EventKind.TASK_START:
        raise MalformedLog("log must start with task_start")
    if events[-1].kind is not EventKind.TASK_COMPLETE:
        raise MalformedLog("log must end with task_complete")
    completes = [e for e in events if e.kind is EventKind.TASK_COMPLETE]
    if len(completes) != 1:
        raise MalformedLog("task_complete must occur exactly once")
    times = [e.time_s for e in events]
    if any(b < a for a, b in zip(times, times[1:])):
        raise MalformedLog("timestamps must be non-decreasing")
    duration = events[-1].time_s - events[0].time_s
    if duration <= 0:
        raise MalformedLog("completion must happen strictly after start")
    return MetricsRow(
        condition=events[0].condition or "?",
        completion_time=duration,
        wrong_selections=sum(e.kind is EventKind.WRONG_SELECT for e in events),
        wrong_placements=sum(e.kind is EventKind.WRONG_PLACE for e in events),
    )


METRIC_FIELDS = ("completion_time", "wrong_selections", "wrong_placements")
METRIC_TITLES = {"completion_time": "Completion Time (s)",
                 "wrong_selections": "Wrong Selections",
                 "wrong_placements": "Wrong Placements"}


def median_iqr(values: Sequence[float]) -> Tuple[float, float]:
    """Median and inter-quartile range; quartiles use linear interpolation and
    an even-count median is the mean of the two middle order statistics."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise EmptyGroup("cannot summarize an empty group")
    q1, q2, q3 = np.percentile(arr, [25.0, 50.0, 75.0], method="linear")
    return float(q2), float(q3 - q1)


def summarize(rows: Sequence[MetricsRow],
              conditions: Optional[Sequence[str]] = None) -> Dict[str, Dict[str, Tuple[float, float]]]:
    """Per-condition (median, IQR) for every metric, keyed by condition name."""
    if conditions is None:
        seen = []
        for row in rows:
            if row.condition not in seen:
                seen.append(row.condition)
        conditions = seen
    if not conditions:
        raise EmptyGroup("no conditions to summarize")
    table: Dict[str, Dict[str, Tuple[float, float]]] = {}
    for cond in conditions:
        group = [r for r in rows if r.condition == cond]
        if not group:
            raise EmptyGroup(f"no rows for condition {cond!r}")
        table[cond] = {f: median_iqr([getattr(r, f) for r in group]) for f in METRIC_FIELDS}
    return table


def _fmt(x: float) -> str:
    return f"{x:.4g}"


def format_summary(table: Dict[str, Dict[str, Tuple[float, float]]]) -> str:
    """Aligned text table, one condition per row, 'median (IQR)' cells."""
    headers = ["Condition"] + [METRIC_TITLES[f] for f in METRIC_FIELDS]
    body = [[cond] + [f"{_fmt(m)} ({_fmt(iqr)})" for m, iqr in
                      (table[cond][f] for f in METRIC_FIELDS)]
            for cond in table]
    widths = [max(len(row[i]) for row in [headers] + body) for i in range(len(headers))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Puzzle file round-trip
# ---------------------------------------------------------------------------

def puzzle_to_json(puzzle: PuzzleSpec, board: Optional[BoardSpec] = None) -> str:
    doc = {
        "id": puzzle.id,
        "initial": {"cube": puzzle.initial[0], "cell": list(puzzle.initial[1])},
        "starts": {str(cid): list(cell) for cid, cell in puzzle.starts},
        "solution": [{"cube": s.cube_id, "cell": list(s.target)} for s in puzzle.solution],
        "complexity": {"total_distance": puzzle.complexity.total_distance,
                       "adjacency": list(puzzle.complexity.adjacency)},
    }
    if board is not None:
        doc["board"] = {"columns": board.columns, "rows": board.rows}
    return json.dumps(doc, indent=2, sort_keys=True)


def puzzle_from_json(text: str) -> PuzzleSpec:
    doc = json.loads(text)
    starts = tuple(sorted((int(cid), tuple(cell)) for cid, cell in doc["starts"].items()))
    return PuzzleSpec(
        id=int(doc["id"]),
        initial=(int(doc["initial"]["cube"]), tuple(doc["initial"]["cell"])),
        starts=starts,
        solution=tuple(SolutionStep(int(s["cube"]), tuple(s["cell"]))
                       for s in doc["solution"]),
        complexity=ComplexityCertificate(
            total_distance=int(doc["complexity"]["total_distance"]),
            adjacency=tuple(bool(b) for b in doc["complexity"]["adjacency"])),
    )
