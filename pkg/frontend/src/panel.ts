// Instructor solution panel model: which step is done, current, or pending.

import type { SessionMirror } from "./state.js";

export interface PanelStep {
  index: number;
  cube: number;
  col: number;
  row: number;
  status: "done" | "current" | "pending";
}

export interface PanelModel {
  steps: PanelStep[];
  done: boolean;
  taskIndex: number;
}

export function instructorPanel(mirror: SessionMirror): PanelModel {
  const progress = mirror.progress;
  const steps = mirror.solution.map((step, i) => ({
    index: i + 1,
    cube: step.cube,
    col: step.col,
    row: step.row,
    status: (i < progress ? "done" : i === progress ? "current" : "pending") as
      PanelStep["status"],
  }));
  const done = mirror.solution.length > 0 && progress >= mirror.solution.length;
  return { steps, done, taskIndex: mirror.taskIndex };
}
