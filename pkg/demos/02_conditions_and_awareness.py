# The four study conditions as geometry, and the awareness matrix that
# machine-checks which communication channels survive each of them.

import numpy as np

from negspace.awareness import (
    ambiguity_report,
    channel_report,
    design_space_matrix,
    format_matrix,
)
from negspace.board import BoardSpec, BoardState, Cube, CubeColor
from negspace.geometry import (
    MP,
    MW,
    RL,
    SS,
    GlueEntity,
    aim_orientation,
    default_volume,
    glue_transform,
)

volume = default_volume()
board = BoardSpec.centered_on(volume)

# Each condition is just a pair of rigid maps applied on the assembler's
# renderer: one to the workspace, one to the remote person.
for cond in (RL, SS, MP, MW):
    w = [int(x) for x in glue_transform(cond, GlueEntity.WORKSPACE).linear.diagonal()]
    e = [int(x) for x in glue_transform(cond, GlueEntity.EMBODIMENT).linear.diagonal()]
    print(f"{cond.name}: workspace diag{tuple(w)}, embodiment diag{tuple(e)}")

# The analyzer aims a synthetic instructor ray at every board cell, pushes
# ray and board through the condition's maps, and checks what the rendered
# ray actually denotes.  No table lookups anywhere.
print()
print(format_matrix(design_space_matrix(volume, board)))

mp = channel_report(MP, volume, board)
print(f"\nMP keeps lateral pointing {mp.lateral_pointing.value} but depth "
      f"pointing stays {mp.depth_pointing.value}: mirroring the person fixes "
      f"left-right, not near-far.")

# The opposing-view ambiguity of pointing along a line of cubes:
state = BoardState(spec=board, cubes=(
    Cube(id=0, color=CubeColor.RED, cell=(4, 0)),
    Cube(id=1, color=CubeColor.BLUE, cell=(4, 3)),
))
boxes = state.scene_boxes()
centers = [(b.lo + b.hi) / 2.0 for b in boxes]
hand = centers[0] - np.array([0.0, 0.0, 1.0])
orientation = aim_orientation(hand, centers[1])

for label, eye in [("instructor side", np.array([0.0, 0.4, -1.25])),
                   ("assembler (opposing)", np.array([0.0, 0.0, 1.25]))]:
    rep = ambiguity_report(eye, hand, orientation, state, threshold=0.05)
    angles = ", ".join(f"cube {cid}: {a * 1000:.1f} mrad" for cid, a in rep.candidates)
    print(f"{label:22s} -> ambiguous={rep.ambiguous}  ({angles})")
