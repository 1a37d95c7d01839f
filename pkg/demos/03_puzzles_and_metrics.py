# Puzzle generation under the equal-complexity rule set, step judging,
# and the median/IQR summary table.

from negspace.board import BoardSpec, drop, pick, select
from negspace.geometry import default_volume
from negspace.tasks import (
    EventKind,
    RuleSet,
    SessionEvent,
    format_summary,
    generate_puzzle,
    judge_event,
    score_log,
    summarize,
    validate_puzzle,
)

board = BoardSpec.centered_on(default_volume())
rules = RuleSet()

puzzles = [generate_puzzle(seed, board, rules) for seed in range(1, 9)]
print("eight puzzles, one complexity certificate:")
for p in puzzles:
    steps = " -> ".join(f"{s.cube_id}@{s.target}" for s in p.solution)
    print(f"  seed {p.id}: initial cube {p.initial[0]} at {p.initial[1]}; {steps}")
print(f"  shared certificate: {puzzles[0].complexity}")
assert len({p.complexity for p in puzzles}) == 1
assert all(validate_puzzle(p, board, rules).passed for p in puzzles)

# Replay one solution through the board state machine, judging as we go.
puzzle = puzzles[0]
state = puzzle.initial_board_state(board)
events = [SessionEvent(0.0, EventKind.TASK_START, condition="RL")]
t = 0.0
for progress, step in enumerate(puzzle.solution):
    t += 12.5
    state = drop(pick(select(state, step.cube_id)), step.target)
    event = SessionEvent(t, EventKind.DROP, cube_id=step.cube_id, cell=step.target)
    verdict = judge_event(puzzle, progress, event)
    events.append(event)
    print(f"t={t:5.1f}s drop cube {step.cube_id} at {step.target}: {verdict.value}")
events.append(SessionEvent(t, EventKind.TASK_COMPLETE))

row = score_log(events)
print(f"\nscored: {row.completion_time:.1f}s, "
      f"{row.wrong_selections} wrong selections, "
      f"{row.wrong_placements} wrong placements")

# A handful of synthetic rows, summarized the way Table-style reports want.
rows = [row] + [
    score_log([SessionEvent(0.0, EventKind.TASK_START, condition=c),
               *[SessionEvent(5.0, EventKind.WRONG_PLACE, cube_id=1)] * wp,
               SessionEvent(t_done, EventKind.TASK_COMPLETE)])
    for c, wp, t_done in [("RL", 2, 95.0), ("SS", 1, 81.0), ("SS", 2, 88.5),
                          ("MP", 1, 74.0), ("MP", 0, 70.0), ("MW", 1, 90.0),
                          ("MW", 3, 101.0)]
]
print()
print(format_summary(summarize(rows)))
