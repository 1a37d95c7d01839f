// Client-side session mirror.  Holds no authoritative state: everything here
// is replayed from gateway frames, and a fresh snapshot rebuilds it exactly.

import {
  ConfigMsg,
  CubeMove,
  DELTA_DESELECT,
  DELTA_DROP,
  DELTA_PICK,
  DELTA_SELECT,
  EmbodimentFrameMsg,
  NO_CUBE,
  ROLE_ASSEMBLER,
  ServerMessage,
  SnapshotCube,
} from "./schema.js";

export interface MirrorCube {
  cube: number;
  color: number | null;           // null renders neutral gray
  cell: [number, number] | null;  // null while held
}

export interface FadeState {
  active: boolean;
  startedAt: number; // ms timestamp from the injected clock
}

export class SessionMirror {
  config: ConfigMsg | null = null;
  participant: number;
  role: number | null = null;
  conditionCode = 0;
  taskIndex = 0;
  puzzleId = 0;
  initial: CubeMove | null = null;
  solution: CubeMove[] = [];
  cubes: MirrorCube[] = [];
  selection: number | null = null;
  held: number | null = null;
  highlight: number | null = null;
  embodiment: EmbodimentFrameMsg | null = null;
  fade: FadeState = { active: false, startedAt: 0 };
  sessionOver = false;
  toasts: string[] = [];
  private now: () => number;

  constructor(participant: number, now: () => number = () => Date.now()) {
    this.participant = participant;
    this.now = now;
  }

  get isAssembler(): boolean {
    return this.role === ROLE_ASSEMBLER;
  }

  cubeById(id: number): MirrorCube | undefined {
    return this.cubes.find((c) => c.cube === id);
  }

  cubeAt(col: number, row: number): MirrorCube | undefined {
    return this.cubes.find((c) => c.cell !== null
      && c.cell[0] === col && c.cell[1] === row);
  }

  /** Count of solution steps currently satisfied on the board (instructor). */
  get progress(): number {
    for (let i = 0; i < this.solution.length; i++) {
      const step = this.solution[i];
      const cube = this.cubeById(step.cube);
      if (!cube || cube.cell === null
          || cube.cell[0] !== step.col || cube.cell[1] !== step.row) return i;
    }
    return this.solution.length;
  }

  apply(msg: ServerMessage): void {
    switch (msg.type) {
      case "config":
        this.config = msg;
        return;
      case "toast":
        this.toasts.push(msg.message);
        return;
      case "role_assign":
        if (msg.participant === this.participant) this.role = msg.role;
        return;
      case "task_start":
        this.taskIndex = msg.task_index;
        this.conditionCode = msg.condition_code;
        this.puzzleId = msg.puzzle_id;
        this.initial = msg.initial ?? null;
        this.solution = msg.solution ?? [];
        this.fade = { active: false, startedAt: 0 };
        return;
      case "state_snapshot":
        this.loadSnapshot(msg.cubes);
        return;
      case "state_delta":
        this.applyDelta(msg.op, msg.cube, msg.col, msg.row);
        return;
      case "highlight":
        this.highlight = msg.cube === NO_CUBE ? null : msg.cube;
        return;
      case "embodiment_frame":
        if (!this.embodiment || msg.frame_seq > this.embodiment.frame_seq) {
          this.embodiment = msg;
        }
        return;
      case "task_complete":
        this.fade = { active: true, startedAt: this.now() };
        if (msg.task_index >= 8) this.sessionOver = true;
        return;
    }
  }

  private loadSnapshot(records: SnapshotCube[]): void {
    this.cubes = records.map((r) => ({
      cube: r.cube,
      color: r.color === undefined || r.color === 255 ? null : r.color,
      cell: r.col === 255 ? null : ([r.col, r.row] as [number, number]),
    }));
    this.selection = this.held = this.highlight = null;
    for (const r of records) {
      if (r.flags & 1) this.selection = r.cube;
      if (r.flags & 2) this.held = r.cube;
      if (r.flags & 4) this.highlight = r.cube;
    }
  }

  private applyDelta(op: number, cube: number, col: number, row: number): void {
    if (op === DELTA_SELECT) {
      this.selection = cube;
      this.highlight = cube;
    } else if (op === DELTA_PICK) {
      const held = this.selection;
      if (held === null) return;
      this.held = held;
      const c = this.cubeById(held);
      if (c) c.cell = null;
    } else if (op === DELTA_DROP) {
      const c = this.cubeById(cube);
      if (c) c.cell = [col, row];
      this.held = this.selection = this.highlight = null;
    } else if (op === DELTA_DESELECT) {
      this.selection = this.highlight = null;
    }
  }

  /** Displayed color index for a cube: instructors see truth, assemblers gray. */
  displayedColor(cube: MirrorCube): number | null {
    if (this.isAssembler) return null;
    return cube.color;
  }

  takeToasts(): string[] {
    const out = this.toasts;
    this.toasts = [];
    return out;
  }
}
