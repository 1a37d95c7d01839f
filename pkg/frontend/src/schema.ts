// Gateway message schema: field-for-field JSON mirror of the binary wire
// format, plus the two gateway-local frames (config hello, toast).

export const NO_CUBE = 255;
export const NO_CELL = 255;

export const DELTA_SELECT = 1;
export const DELTA_PICK = 2;
export const DELTA_DROP = 3;
export const DELTA_DESELECT = 4;

export const ROLE_INSTRUCTOR = 0;
export const ROLE_ASSEMBLER = 1;

export interface CubeMove {
  cube: number;
  col: number;
  row: number;
}

export interface JoinMsg {
  type: "join";
  seq: number;
  participant: number;
  name: string;
}

export interface RoleAssignMsg {
  type: "role_assign";
  seq: number;
  participant: number;
  role: number;
}

export interface TaskStartMsg {
  type: "task_start";
  seq: number;
  task_index: number;
  condition_code: number;
  puzzle_id: number;
  initial?: CubeMove;
  starts?: CubeMove[];
  solution?: CubeMove[];
}

export interface SnapshotCube {
  cube: number;
  color?: number; // absent for the assembler: colors are the instructor's secret
  col: number;
  row: number;
  flags: number;  // bit0 selected, bit1 held, bit2 highlighted
}

export interface StateSnapshotMsg {
  type: "state_snapshot";
  seq: number;
  columns: number;
  rows: number;
  cubes: SnapshotCube[];
}

export interface StateDeltaMsg {
  type: "state_delta";
  seq: number;
  op: number;
  cube: number;
  col: number;
  row: number;
}

export interface HighlightMsg {
  type: "highlight";
  seq: number;
  cube: number;
}

export interface EmbodimentJoint {
  joint_id: number; // 0 head, 1 left hand, 2 right hand, 3 torso
  position: [number, number, number];
}

export interface EmbodimentFrameMsg {
  type: "embodiment_frame";
  seq: number;
  frame_seq: number;
  timestamp_us: number;
  joints: EmbodimentJoint[];
  points: [number, number, number, number, number, number][];
}

export interface TaskCompleteMsg {
  type: "task_complete";
  seq: number;
  task_index: number;
  timestamp_us: number;
}

export interface PoseSampleMsg {
  type: "pose_sample";
  seq: number;
  timestamp_us: number;
  head: [number, number, number];
  hand: [number, number, number];
  orientation: [number, number, number, number];
}

export interface ButtonEventMsg {
  type: "button_event";
  seq: number;
  timestamp_us: number;
  button: number;
}

export interface PlaneDoc {
  lower_left: [number, number, number];
  lower_right: [number, number, number];
  upper_left: [number, number, number];
}

export interface ConditionDoc {
  code: number;
  name: string | null;
  label: string;
  workspace_matrix: number[];   // 16 entries, row-major
  embodiment_matrix: number[];
}

export interface ConfigMsg {
  type: "config";
  volume: { width: number; height: number; depth: number };
  screens: { instructor: PlaneDoc; assembler: PlaneDoc };
  board: { columns: number; rows: number; cell_m: number; origin: [number, number, number] };
  cube_edge_m: number;
  stance_m: number;
  conditions: ConditionDoc[];
}

export interface ToastMsg {
  type: "toast";
  message: string;
}

export type ServerMessage =
  | ConfigMsg
  | ToastMsg
  | RoleAssignMsg
  | TaskStartMsg
  | StateSnapshotMsg
  | StateDeltaMsg
  | HighlightMsg
  | EmbodimentFrameMsg
  | TaskCompleteMsg;

export type ClientMessage = JoinMsg | PoseSampleMsg | ButtonEventMsg
  | EmbodimentFrameMsg;

export function parseServerMessage(text: string): ServerMessage {
  const doc = JSON.parse(text) as { type?: string };
  switch (doc.type) {
    case "config":
    case "toast":
    case "role_assign":
    case "task_start":
    case "state_snapshot":
    case "state_delta":
    case "highlight":
    case "embodiment_frame":
    case "task_complete":
      return doc as ServerMessage;
    default:
      throw new Error(`unknown gateway frame type: ${doc.type}`);
  }
}
