# Negative-space workspace geometry walkthrough:
# build the tunnel volume, project it head-coupled onto each display, and
# place the head-coupled cursor.

import numpy as np

from negspace.geometry import (
    DisplayPlane,
    Role,
    build_volume,
    cursor_on_screen,
    default_volume,
    project_point,
    projection_matrix,
)

# --- the tunnel -------------------------------------------------------------
# Two 55-inch portrait displays, half a meter apart, glued into one volume.

volume = default_volume()
print(f"display: {volume.width:.3f} m x {volume.height:.3f} m")
print(f"volume depth: {volume.depth} m")
print(f"instructor plane center: {volume.local_plane.center}")
print(f"assembler plane center:  {volume.remote_plane.center}")

# Any point between the planes splits the depth exactly.
p = np.array([0.1, -0.2, 0.07])
d1 = abs(volume.local_plane.signed_distance(p))
d2 = abs(volume.remote_plane.signed_distance(p))
print(f"\npoint {p}: {d1:.3f} m from one plane, {d2:.3f} m from the other "
      f"(sum {d1 + d2:.3f} = depth)")

# --- head-coupled projection -------------------------------------------------
# The frustum is pinned to the physical screen: all four corners land exactly
# on the edge of normalized device coordinates, wherever the head is.

screen = volume.screen_plane(Role.INSTRUCTOR)
for eye in ([0.0, 0.0, -1.25], [0.35, 0.2, -1.1], [-0.4, -0.3, -0.8]):
    m = projection_matrix(eye, screen, near=0.05, far=10.0)
    ndc = [project_point(m, c) for c in screen.corners()]
    worst = max(abs(abs(v) - 1.0) for p in ndc for v in p[:2])
    print(f"eye {str(eye):24s} corner NDC error: {worst:.2e}")

# Motion parallax: content on the screen surface never moves with the head,
# content inside the volume does.

on_screen = screen.point_at(0.2, 0.7)
inside = np.array([0.0, 0.0, 0.0])
for label, point in [("on-screen point", on_screen), ("volume center", inside)]:
    a = project_point(projection_matrix([0.0, 0.0, -1.25], screen, 0.05, 10), point)
    b = project_point(projection_matrix([0.3, 0.1, -1.25], screen, 0.05, 10), point)
    shift = np.linalg.norm(a[:2] - b[:2])
    print(f"{label:16s} NDC shift under head motion: {shift:.6f}")

# --- the cursor ----------------------------------------------------------------
# The screen cursor sits where the head-to-target line pierces the display,
# so it visually covers the target inside the volume.

head = np.array([0.2, 0.0, 1.25])
target = np.array([0.0, 0.0, 0.0])
cursor = cursor_on_screen(head, target, volume.screen_plane(Role.ASSEMBLER))
print(f"\ncursor for head {head} aiming at the volume center: "
      f"u={cursor.u:.3f} m, v={cursor.v:.3f} m, on screen: {cursor.on_screen}")
