// The TypeScript off-axis projection must agree with the engine: fixture
// matrices and NDC values are exported from the reference implementation.

import { describe, expect, it } from "vitest";

import { offAxisProjection, projectPoint, screenFromPlane, Vec3 } from "../src/math.js";
import type { PlaneDoc } from "../src/schema.js";
import { loadFixture } from "./helpers.js";

interface ProjectionCase {
  eye: Vec3;
  screen: PlaneDoc;
  near: number;
  far: number;
  matrix: number[];
  points: { world: Vec3; ndc: Vec3 }[];
}

const cases = loadFixture<ProjectionCase[]>("projection_cases.json");

describe("off-axis projection conformance", () => {
  it("reproduces the reference matrices", () => {
    for (const c of cases) {
      const m = offAxisProjection(c.eye, screenFromPlane(c.screen), c.near, c.far);
      for (let i = 0; i < 16; i++) {
        expect(m[i]).toBeCloseTo(c.matrix[i], 9);
      }
    }
  });

  it("reproduces the reference NDC for every fixture point", () => {
    for (const c of cases) {
      const m = offAxisProjection(c.eye, screenFromPlane(c.screen), c.near, c.far);
      for (const p of c.points) {
        const ndc = projectPoint(m, p.world);
        expect(ndc[0]).toBeCloseTo(p.ndc[0], 9);
        expect(ndc[1]).toBeCloseTo(p.ndc[1], 9);
        expect(ndc[2]).toBeCloseTo(p.ndc[2], 9);
      }
    }
  });

  it("pins all four screen corners to the NDC boundary", () => {
    for (const c of cases) {
      const screen = screenFromPlane(c.screen);
      const m = offAxisProjection(c.eye, screen, c.near, c.far);
      for (const p of c.points.slice(0, 4)) {
        const ndc = projectPoint(m, p.world);
        expect(Math.abs(Math.abs(ndc[0]) - 1)).toBeLessThan(1e-9);
        expect(Math.abs(Math.abs(ndc[1]) - 1)).toBeLessThan(1e-9);
      }
    }
  });

  it("rejects an eye in the screen plane", () => {
    const c = cases[0];
    const screen = screenFromPlane(c.screen);
    const inPlane = screen.lowerLeft;
    expect(() => offAxisProjection(inPlane, screen, 0.05, 10)).toThrow();
  });
});
