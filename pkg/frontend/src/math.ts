// Minimal 3D math: vectors, row-major 4x4 matrices, and the head-coupled
// off-axis projection whose image rectangle is exactly the physical screen.

import type { PlaneDoc } from "./schema.js";

export type Vec3 = [number, number, number];
export type Mat4 = number[]; // 16 entries, row-major

export function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function scale(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

export function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

export function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

export function norm(a: Vec3): number {
  return Math.sqrt(dot(a, a));
}

export function normalize(a: Vec3): Vec3 {
  const n = norm(a);
  if (n < 1e-12) throw new Error("cannot normalize a zero vector");
  return scale(a, 1 / n);
}

export function identity4(): Mat4 {
  return [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1];
}

export function mat4MulMat(a: Mat4, b: Mat4): Mat4 {
  const out = new Array(16).fill(0);
  for (let r = 0; r < 4; r++)
    for (let c = 0; c < 4; c++)
      for (let k = 0; k < 4; k++) out[r * 4 + c] += a[r * 4 + k] * b[k * 4 + c];
  return out;
}

export function mat4MulPoint(m: Mat4, p: Vec3): [number, number, number, number] {
  const v = [p[0], p[1], p[2], 1];
  const out: number[] = [0, 0, 0, 0];
  for (let r = 0; r < 4; r++)
    for (let k = 0; k < 4; k++) out[r] += m[r * 4 + k] * v[k];
  return out as [number, number, number, number];
}

export function transformPoint(m: Mat4, p: Vec3): Vec3 {
  const [x, y, z, w] = mat4MulPoint(m, p);
  return [x / w, y / w, z / w];
}

export function transformDir(m: Mat4, d: Vec3): Vec3 {
  return [
    m[0] * d[0] + m[1] * d[1] + m[2] * d[2],
    m[4] * d[0] + m[5] * d[1] + m[6] * d[2],
    m[8] * d[0] + m[9] * d[1] + m[10] * d[2],
  ];
}

export function projectPoint(m: Mat4, p: Vec3): Vec3 {
  const [x, y, z, w] = mat4MulPoint(m, p);
  if (Math.abs(w) < 1e-15) throw new Error("point projects to infinity");
  return [x / w, y / w, z / w];
}

export interface Screen {
  lowerLeft: Vec3;
  right: Vec3;  // unit, the direction that appears rightward to the viewer
  up: Vec3;     // unit
  width: number;
  height: number;
  normal: Vec3; // algebraic right x up
}

export function screenFromPlane(doc: PlaneDoc): Screen {
  const ll = doc.lower_left as Vec3;
  const lr = doc.lower_right as Vec3;
  const ul = doc.upper_left as Vec3;
  const width = norm(sub(lr, ll));
  const height = norm(sub(ul, ll));
  const right = scale(sub(lr, ll), 1 / width);
  const up = scale(sub(ul, ll), 1 / height);
  return { lowerLeft: ll, right, up, width, height, normal: normalize(cross(right, up)) };
}

// Same construction as the engine: the frustum is anchored to the physical
// screen rectangle, so its corners always land on the NDC boundary and the
// screen surface is a fixed point of head motion.
export function offAxisProjection(eye: Vec3, screen: Screen, near: number, far: number): Mat4 {
  if (!(near > 0 && near < far)) throw new Error("need 0 < near < far");
  const h = dot(screen.normal, sub(eye, screen.lowerLeft));
  if (Math.abs(h) < 1e-6) throw new Error("eye lies in the screen plane");
  const toward = scale(screen.normal, -Math.sign(h));
  const d = Math.abs(h);

  const left = dot(sub(screen.lowerLeft, eye), screen.right);
  const right = left + screen.width;
  const bottom = dot(sub(screen.lowerLeft, eye), screen.up);
  const top = bottom + screen.height;

  const view = identity4();
  view[0] = screen.right[0]; view[1] = screen.right[1]; view[2] = screen.right[2];
  view[3] = -dot(screen.right, eye);
  view[4] = screen.up[0]; view[5] = screen.up[1]; view[6] = screen.up[2];
  view[7] = -dot(screen.up, eye);
  view[8] = toward[0]; view[9] = toward[1]; view[10] = toward[2];
  view[11] = -dot(toward, eye);

  const frustum = new Array(16).fill(0);
  frustum[0] = (2 * d) / (right - left);
  frustum[2] = -(right + left) / (right - left);
  frustum[5] = (2 * d) / (top - bottom);
  frustum[6] = -(top + bottom) / (top - bottom);
  frustum[10] = (far + near) / (far - near);
  frustum[11] = (-2 * far * near) / (far - near);
  frustum[14] = 1;
  return mat4MulMat(frustum, view);
}

// Pointer aiming: a mouse position in NDC names a point on the physical
// screen rectangle; the pointing ray runs from the eye through that point.
export function screenPointFromNdc(screen: Screen, ndcX: number, ndcY: number): Vec3 {
  const u = ((ndcX + 1) / 2) * screen.width;
  const v = ((ndcY + 1) / 2) * screen.height;
  return add(screen.lowerLeft, add(scale(screen.right, u), scale(screen.up, v)));
}

// Unit quaternion (x, y, z, w) turning direction `a` onto direction `b`.
export function quatBetween(a: Vec3, b: Vec3): [number, number, number, number] {
  const an = normalize(a);
  const bn = normalize(b);
  const d = dot(an, bn);
  if (d < -1 + 1e-12) {
    let axis = cross(an, [1, 0, 0]);
    if (norm(axis) < 1e-9) axis = cross(an, [0, 1, 0]);
    const ax = normalize(axis);
    return [ax[0], ax[1], ax[2], 0];
  }
  const u = cross(an, bn);
  const q: [number, number, number, number] = [u[0], u[1], u[2], 1 + d];
  const n = Math.hypot(q[0], q[1], q[2], q[3]);
  return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
}

export const POINTER_FORWARD: Vec3 = [0, 0, -1];
