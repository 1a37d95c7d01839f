// Canvas painter for scene outputs.  Thin by design: geometry decisions all
// live in scene.ts where they are tested.

import type { SceneOutput } from "./scene.js";

export function paintScene(canvas: HTMLCanvasElement, scene: SceneOutput): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.fillStyle = "#15151c";
  ctx.fillRect(0, 0, w, h);

  const toPx = (p: [number, number]): [number, number] =>
    [((p[0] + 1) / 2) * w, ((1 - p[1]) / 2) * h];

  for (const item of scene.items) {
    const pts = item.points.map(toPx);
    if (item.kind === "avatar-point") {
      ctx.fillStyle = item.fill ?? "#888";
      ctx.fillRect(pts[0][0] - 1.5, pts[0][1] - 1.5, 3, 3);
      continue;
    }
    ctx.beginPath();
    ctx.moveTo(pts[0][0], pts[0][1]);
    for (const p of pts.slice(1)) ctx.lineTo(p[0], p[1]);
    if (item.kind === "cube-face" || item.kind === "highlight") ctx.closePath();
    if (item.fill) {
      ctx.fillStyle = item.fill;
      ctx.fill();
    }
    if (item.stroke) {
      ctx.strokeStyle = item.stroke;
      ctx.lineWidth = item.lineWidth ?? 1;
      ctx.stroke();
    }
  }

  if (scene.fadeAlpha > 0) {
    ctx.fillStyle = `rgba(0, 0, 0, ${scene.fadeAlpha})`;
    ctx.fillRect(0, 0, w, h);
  }
}
