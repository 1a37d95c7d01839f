// Pure render model: from the session mirror and a view configuration to a
// list of projected draw items.  The canvas painter consumes these verbatim,
// which keeps everything about the view testable without a DOM.

import {
  Mat4,
  Screen,
  Vec3,
  add,
  identity4,
  norm,
  offAxisProjection,
  projectPoint,
  scale,
  screenFromPlane,
  sub,
  transformPoint,
} from "./math.js";
import { ROLE_ASSEMBLER, ROLE_INSTRUCTOR } from "./schema.js";
import type { MirrorCube, SessionMirror } from "./state.js";

export type HeadProxyMode = "fixed" | "pointer-look";

export interface ViewConfig {
  role: number;
  headProxy: HeadProxyMode;
  pointerNdc: [number, number]; // last pointer position, for pointer-look
}

export interface DrawItem {
  kind: "board-line" | "cube-face" | "highlight" | "avatar-bone" | "avatar-point";
  points: [number, number][]; // NDC x,y
  depth: number;              // eye distance, for painter ordering
  fill?: string;
  stroke?: string;
  lineWidth?: number;
}

export interface SceneOutput {
  items: DrawItem[];
  fadeAlpha: number; // 0 transparent .. 1 fully black
  holdingCube: number | null;
}

export const CUBE_PALETTE = ["#d64541", "#51a351", "#3b7dd8", "#e0c341", "#8e5bb8"];
export const NEUTRAL_GRAY = "#9a9a9a";
const FADE_MS = 1200;

export function paletteColor(colorIndex: number | null): string {
  if (colorIndex === null || colorIndex < 0 || colorIndex >= CUBE_PALETTE.length) {
    return NEUTRAL_GRAY;
  }
  return CUBE_PALETTE[colorIndex];
}

/** Glue maps for this viewer.  Conditions reshape the assembler's whole view;
 * the instructor keeps the physically glued workspace but still sees the
 * remote person through the condition's embodiment map. */
export function viewTransforms(mirror: SessionMirror,
                               role: number): { workspace: Mat4; embodiment: Mat4 } {
  const config = mirror.config;
  if (!config) return { workspace: identity4(), embodiment: identity4() };
  const cond = config.conditions.find((c) => c.code === mirror.conditionCode);
  if (!cond) return { workspace: identity4(), embodiment: identity4() };
  if (role === ROLE_ASSEMBLER) {
    return { workspace: cond.workspace_matrix, embodiment: cond.embodiment_matrix };
  }
  return { workspace: identity4(), embodiment: cond.embodiment_matrix };
}

export function viewScreen(mirror: SessionMirror, role: number): Screen {
  const config = mirror.config!;
  const doc = role === ROLE_INSTRUCTOR ? config.screens.instructor
    : config.screens.assembler;
  return screenFromPlane(doc);
}

export function viewEye(mirror: SessionMirror, view: ViewConfig): Vec3 {
  const config = mirror.config!;
  const z = config.volume.depth / 2 + config.stance_m;
  const eye: Vec3 = [0, 0, view.role === ROLE_INSTRUCTOR ? -z : z];
  if (view.headProxy === "pointer-look") {
    eye[0] += view.pointerNdc[0] * 0.25;
    eye[1] += view.pointerNdc[1] * 0.15;
  }
  return eye;
}

function cubeCorners(center: Vec3, edge: number): Vec3[] {
  const h = edge / 2;
  const corners: Vec3[] = [];
  for (const dx of [-h, h])
    for (const dy of [-h, h])
      for (const dz of [-h, h]) corners.push(add(center, [dx, dy, dz]));
  return corners;
}

// Index quads into the corner array built above (x-major, then y, then z).
const FACES = [
  [0, 1, 3, 2], // -x
  [4, 5, 7, 6], // +x
  [0, 1, 5, 4], // -y
  [2, 3, 7, 6], // +y
  [0, 2, 6, 4], // -z
  [1, 3, 7, 5], // +z
];

export function buildScene(mirror: SessionMirror, view: ViewConfig,
                           nowMs: number): SceneOutput {
  const items: DrawItem[] = [];
  const config = mirror.config;
  if (!config || mirror.role === null) {
    return { items, fadeAlpha: 0, holdingCube: mirror.held };
  }
  const screen = viewScreen(mirror, view.role);
  const eye = viewEye(mirror, view);
  const projection = offAxisProjection(eye, screen, 0.05, 10.0);
  const { workspace, embodiment } = viewTransforms(mirror, view.role);

  // points at (or behind) the eye plane are unrenderable; callers skip them
  const project = (p: Vec3): [number, number] | null => {
    try {
      const ndc = projectPoint(projection, p);
      if (!Number.isFinite(ndc[0]) || !Number.isFinite(ndc[1])) return null;
      return [ndc[0], ndc[1]];
    } catch {
      return null;
    }
  };

  // board grid on the volume floor, pushed through the workspace map
  const { columns, rows, cell_m, origin } = config.board;
  const [ox, oy, oz] = origin;
  for (let c = 0; c <= columns; c++) {
    const x = ox + (c - 0.5) * cell_m;
    const a = transformPoint(workspace, [x, oy, oz - 0.5 * cell_m]);
    const b = transformPoint(workspace, [x, oy, oz + (rows - 0.5) * cell_m]);
    const pa = project(a);
    const pb = project(b);
    if (pa && pb) {
      items.push({ kind: "board-line", points: [pa, pb],
                   depth: (norm(sub(a, eye)) + norm(sub(b, eye))) / 2,
                   stroke: "#4c4c55", lineWidth: 1 });
    }
  }
  for (let r = 0; r <= rows; r++) {
    const z = oz + (r - 0.5) * cell_m;
    const a = transformPoint(workspace, [ox - 0.5 * cell_m, oy, z]);
    const b = transformPoint(workspace, [ox + (columns - 0.5) * cell_m, oy, z]);
    const pa = project(a);
    const pb = project(b);
    if (pa && pb) {
      items.push({ kind: "board-line", points: [pa, pb],
                   depth: (norm(sub(a, eye)) + norm(sub(b, eye))) / 2,
                   stroke: "#4c4c55", lineWidth: 1 });
    }
  }

  // cubes: the assembler's mirror carries no colors, so they render gray
  const edge = config.cube_edge_m;
  for (const cube of mirror.cubes) {
    if (cube.cell === null) continue;
    const center: Vec3 = [ox + cube.cell[0] * cell_m, oy + edge / 2,
                          oz + cube.cell[1] * cell_m];
    const corners = cubeCorners(center, edge).map((p) => transformPoint(workspace, p));
    const fill = paletteColor(mirror.displayedColor(cube));
    for (const face of FACES) {
      const pts = face.map((i) => corners[i]);
      const projected = pts.map((p) => project(p));
      if (projected.some((p) => p === null)) continue;
      const faceCenter = scale(pts.reduce(add, [0, 0, 0] as Vec3), 1 / 4);
      items.push({
        kind: "cube-face",
        points: projected as [number, number][],
        depth: norm(sub(faceCenter, eye)),
        fill,
        stroke: "#22222a",
        lineWidth: 1,
      });
    }
    if (mirror.highlight === cube.cube) {
      const top = [corners[2], corners[3], corners[7], corners[6]];
      const projected = top.map((p) => project(p));
      if (projected.every((p) => p !== null)) {
        const ringCenter = scale(top.reduce(add, [0, 0, 0] as Vec3), 1 / 4);
        items.push({
          kind: "highlight",
          points: projected as [number, number][],
          depth: norm(sub(ringCenter, eye)) - 1e-4,
          stroke: "#ffd34d",
          lineWidth: 3,
        });
      }
    }
  }

  // remote person: skeleton bones and point set through the embodiment map
  const frame = mirror.embodiment;
  if (frame) {
    const joints = new Map<number, Vec3>();
    for (const j of frame.joints) {
      joints.set(j.joint_id, transformPoint(embodiment, j.position as Vec3));
    }
    const head = joints.get(0);
    const torso = joints.get(3);
    const bones: [Vec3 | undefined, Vec3 | undefined][] = [
      [head, torso], [torso, joints.get(1)], [torso, joints.get(2)],
    ];
    for (const [a, b] of bones) {
      if (!a || !b) continue;
      const pa = project(a);
      const pb = project(b);
      if (!pa || !pb) continue;
      items.push({ kind: "avatar-bone", points: [pa, pb],
                   depth: (norm(sub(a, eye)) + norm(sub(b, eye))) / 2,
                   stroke: "#7fd0d4", lineWidth: 4 });
    }
    for (const p of frame.points.slice(0, 512)) {
      const world = transformPoint(embodiment, [p[0], p[1], p[2]]);
      const pw = project(world);
      if (!pw) continue;
      items.push({ kind: "avatar-point", points: [pw],
                   depth: norm(sub(world, eye)),
                   fill: `rgb(${p[3]},${p[4]},${p[5]})` });
    }
  }

  items.sort((a, b) => b.depth - a.depth); // painter order, far first

  let fadeAlpha = 0;
  if (mirror.fade.active) {
    fadeAlpha = Math.min(1, (nowMs - mirror.fade.startedAt) / FADE_MS);
  }
  return { items, fadeAlpha, holdingCube: mirror.held };
}
