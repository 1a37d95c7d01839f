// Pointer input: pose intents aim the canonical-frame ray at what the user
// visually clicked, and the click sequence emits pose then button.

import { describe, expect, it } from "vitest";

import { PointerInput } from "../src/input.js";
import {
  POINTER_FORWARD,
  Vec3,
  add,
  cross,
  dot,
  normalize,
  offAxisProjection,
  projectPoint,
  scale,
  sub,
  transformPoint,
} from "../src/math.js";
import { ButtonEventMsg, PoseSampleMsg, ROLE_ASSEMBLER } from "../src/schema.js";
import { viewEye, viewScreen, viewTransforms, ViewConfig } from "../src/scene.js";
import { mirrorWithConfig } from "./helpers.js";

const SS_CODE = 1; // identical pov, exact embodiment, exact workspace

function quatRotate(q: [number, number, number, number], v: Vec3): Vec3 {
  const u: Vec3 = [q[0], q[1], q[2]];
  const w = q[3];
  const t = cross(u, add(cross(u, v), scale(v, w)));
  return add(v, scale(t, 2));
}

function setupAssembler(conditionCode: number) {
  const mirror = mirrorWithConfig(1);
  mirror.apply({ type: "role_assign", seq: 1, participant: 1, role: ROLE_ASSEMBLER });
  mirror.apply({ type: "task_start", seq: 2, task_index: 1,
                 condition_code: conditionCode, puzzle_id: 1 });
  const view: ViewConfig = { role: ROLE_ASSEMBLER, headProxy: "fixed",
                             pointerNdc: [0, 0] };
  const sent: (PoseSampleMsg | ButtonEventMsg)[] = [];
  const input = new PointerInput(mirror, view, {
    sendPose: (m) => sent.push({ ...m, seq: 0 } as PoseSampleMsg),
    sendButton: (m) => sent.push({ ...m, seq: 0 } as ButtonEventMsg),
  }, () => 1000);
  return { mirror, view, input, sent };
}

describe("pointer input", () => {
  it("click emits an aiming pose followed by a button event", () => {
    const { input, sent } = setupAssembler(SS_CODE);
    input.onClick(0.1, -0.2);
    expect(sent.map((m) => m.type)).toEqual(["pose_sample", "button_event"]);
  });

  it("the canonical ray hits the canonical cube the user visually clicked", () => {
    const { mirror, view, input } = setupAssembler(SS_CODE);
    const config = mirror.config!;
    const { columns, rows, cell_m, origin } = config.board;
    // a canonical cube somewhere off-center
    const cell: [number, number] = [6, 1];
    const canonicalCenter: Vec3 = [
      origin[0] + cell[0] * cell_m,
      origin[1] + config.cube_edge_m / 2,
      origin[2] + cell[1] * cell_m,
    ];
    // where the assembler SEES it: pushed through the workspace map
    const { workspace } = viewTransforms(mirror, ROLE_ASSEMBLER);
    const renderedCenter = transformPoint(workspace, canonicalCenter);
    const screen = viewScreen(mirror, ROLE_ASSEMBLER);
    const eye = viewEye(mirror, view);
    const ndc = projectPoint(offAxisProjection(eye, screen, 0.05, 10), renderedCenter);

    const pose = input.poseFor(ndc[0], ndc[1]);
    const direction = quatRotate(pose.orientation, POINTER_FORWARD);
    // distance from the canonical cube center to the sent ray
    const rel = sub(canonicalCenter, pose.hand as Vec3);
    const along = dot(rel, normalize(direction));
    expect(along).toBeGreaterThan(0); // in front of the pointer
    const closest = sub(rel, scale(normalize(direction), along));
    expect(Math.hypot(...closest)).toBeLessThan(1e-6);
  });

  it("instructor pointers render locally but send nothing", () => {
    const mirror = mirrorWithConfig(0);
    mirror.apply({ type: "role_assign", seq: 1, participant: 0, role: 0 });
    const view: ViewConfig = { role: 0, headProxy: "fixed", pointerNdc: [0, 0] };
    const sent: unknown[] = [];
    const input = new PointerInput(mirror, view, {
      sendPose: (m) => sent.push(m),
      sendButton: (m) => sent.push(m),
    });
    input.onPointerMove(0.3, 0.3);
    input.onClick(0.3, 0.3);
    expect(sent.length).toBe(0);
  });

  it("pose sending is throttled to the configured rate", () => {
    let t = 0;
    const mirror = mirrorWithConfig(1);
    mirror.apply({ type: "role_assign", seq: 1, participant: 1, role: 1 });
    const view: ViewConfig = { role: 1, headProxy: "fixed", pointerNdc: [0, 0] };
    const sent: unknown[] = [];
    const input = new PointerInput(mirror, view, {
      sendPose: (m) => sent.push(m),
      sendButton: () => {},
    }, () => t);
    for (let i = 0; i < 100; i++) {
      t = i; // 1 ms apart: far above 60 Hz
      input.onPointerMove(0, 0);
    }
    expect(sent.length).toBeLessThan(10);
  });
});
