// Conformance against a complete session transcript recorded from the real
// session authority: both participants replay every frame the gateway would
// deliver and must end in a consistent, completed state.

import { describe, expect, it } from "vitest";

import { ROLE_ASSEMBLER } from "../src/schema.js";
import { SessionMirror } from "../src/state.js";
import { configDoc, loadFixture, Transcript } from "./helpers.js";

const transcript = loadFixture<Transcript>("session_transcript.json");

function replay(participant: number): SessionMirror {
  const mirror = new SessionMirror(participant, () => 0);
  mirror.apply(configDoc());
  for (const entry of transcript.messages) {
    if (entry.to === participant) mirror.apply(entry.message);
  }
  return mirror;
}

describe("full-session transcript replay", () => {
  it("both participants complete the eight-task session", () => {
    for (const pid of [0, 1]) {
      const mirror = replay(pid);
      expect(mirror.sessionOver).toBe(true);
      expect(mirror.role).not.toBeNull();
    }
  });

  it("counts one fade per task including training", () => {
    for (const pid of [0, 1]) {
      const completes = transcript.messages.filter(
        (e) => e.to === pid && e.message.type === "task_complete");
      expect(completes.length).toBe(9); // training + 8 tasks
    }
  });

  it("assembler snapshots never carry colors; instructor snapshots always do", () => {
    let roles: Record<number, number | null> = { 0: null, 1: null };
    let maskedSeen = 0;
    let coloredSeen = 0;
    for (const entry of transcript.messages) {
      const msg = entry.message;
      if (msg.type === "role_assign" && typeof msg.participant === "number") {
        roles[msg.participant as number] = msg.role as number;
      }
      if (msg.type === "state_snapshot") {
        const cubes = msg.cubes as { color?: number }[];
        if (roles[entry.to] === ROLE_ASSEMBLER) {
          expect(cubes.every((c) => c.color === undefined)).toBe(true);
          maskedSeen++;
        } else {
          expect(cubes.every((c) => typeof c.color === "number")).toBe(true);
          coloredSeen++;
        }
      }
    }
    expect(maskedSeen).toBeGreaterThan(0);
    expect(coloredSeen).toBeGreaterThan(0);
  });

  it("only the current instructor receives solutions", () => {
    const roles: Record<number, number | null> = { 0: null, 1: null };
    for (const entry of transcript.messages) {
      const msg = entry.message;
      if (msg.type === "role_assign") {
        roles[msg.participant as number] = msg.role as number;
      }
      if (msg.type === "task_start") {
        const hasSolution = "solution" in msg && msg.solution !== undefined;
        expect(hasSolution).toBe(roles[entry.to] === 0);
      }
    }
  });

  it("replicas of both participants agree on the final board layout", () => {
    const a = replay(0);
    const b = replay(1);
    const layout = (m: SessionMirror) =>
      m.cubes.map((c) => ({ cube: c.cube, cell: c.cell }))
        .sort((x, y) => x.cube - y.cube);
    expect(layout(a)).toEqual(layout(b));
    expect(a.cubes.length).toBe(5);
  });

  it("the shared highlight was visible to both participants during play", () => {
    for (const pid of [0, 1]) {
      const highlights = transcript.messages.filter(
        (e) => e.to === pid && e.message.type === "highlight");
      expect(highlights.length).toBeGreaterThan(0);
    }
  });
});
