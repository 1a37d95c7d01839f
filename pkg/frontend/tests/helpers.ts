import { readFileSync } from "node:fs";

import { ConfigMsg, ServerMessage } from "../src/schema.js";
import { SessionMirror } from "../src/state.js";

export function loadFixture<T>(name: string): T {
  const url = new URL(`../fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export function configDoc(): ConfigMsg {
  return loadFixture<ConfigMsg>("config_doc.json");
}

export interface TranscriptEntry {
  to: number;
  message: ServerMessage & Record<string, unknown>;
}

export interface Transcript {
  tasks: number;
  messages: TranscriptEntry[];
}

export function mirrorWithConfig(participant: number,
                                 now: () => number = () => 0): SessionMirror {
  const mirror = new SessionMirror(participant, now);
  mirror.apply(configDoc());
  return mirror;
}
