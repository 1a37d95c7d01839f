// Pointer to protocol: mouse movement becomes pose samples whose ray passes
// through the content under the cursor; clicks become button events.  The
// select -> pick -> drop sequence itself is the server's business.

import {
  POINTER_FORWARD,
  Vec3,
  quatBetween,
  screenPointFromNdc,
  sub,
  transformDir,
  transformPoint,
} from "./math.js";
import { ButtonEventMsg, PoseSampleMsg, ROLE_ASSEMBLER } from "./schema.js";
import { viewEye, viewScreen, viewTransforms, ViewConfig } from "./scene.js";
import type { SessionMirror } from "./state.js";

export interface IntentSink {
  sendPose(msg: Omit<PoseSampleMsg, "seq">): void;
  sendButton(msg: Omit<ButtonEventMsg, "seq">): void;
}

const POSE_MIN_INTERVAL_MS = 1000 / 60;

export class PointerInput {
  private lastPoseAt = 0;

  constructor(private mirror: SessionMirror, private view: ViewConfig,
              private sink: IntentSink,
              private now: () => number = () => Date.now()) {}

  /** The pointing ray for a pointer position, in the canonical shared frame.
   *
   * The visual ray runs from the eye through the pointed screen location into
   * the rendered volume.  The assembler's rendered workspace is the canonical
   * one pushed through the condition's (involutive) workspace map, so mapping
   * the ray back through the same matrix yields the canonical-frame pose the
   * server resolves.
   */
  canonicalRay(ndcX: number, ndcY: number): { origin: Vec3; direction: Vec3 } {
    const screen = viewScreen(this.mirror, this.view.role);
    const eye = viewEye(this.mirror, this.view);
    const through = screenPointFromNdc(screen, ndcX, ndcY);
    const direction = sub(through, eye);
    if (this.view.role === ROLE_ASSEMBLER) {
      const { workspace } = viewTransforms(this.mirror, this.view.role);
      return { origin: transformPoint(workspace, eye),
               direction: transformDir(workspace, direction) };
    }
    return { origin: eye, direction };
  }

  poseFor(ndcX: number, ndcY: number): Omit<PoseSampleMsg, "seq"> {
    const { origin, direction } = this.canonicalRay(ndcX, ndcY);
    const orientation = quatBetween(POINTER_FORWARD, direction);
    return {
      type: "pose_sample",
      timestamp_us: Math.round(this.now() * 1000),
      head: origin,
      hand: origin,
      orientation,
    };
  }

  onPointerMove(ndcX: number, ndcY: number): void {
    this.view.pointerNdc = [ndcX, ndcY];
    if (this.mirror.role !== ROLE_ASSEMBLER) return; // instructor rays are local
    const t = this.now();
    if (t - this.lastPoseAt < POSE_MIN_INTERVAL_MS) return;
    this.lastPoseAt = t;
    this.sink.sendPose(this.poseFor(ndcX, ndcY));
  }

  onClick(ndcX: number, ndcY: number): void {
    if (this.mirror.role !== ROLE_ASSEMBLER) return;
    this.sink.sendPose(this.poseFor(ndcX, ndcY)); // aim exactly where clicked
    this.sink.sendButton({
      type: "button_event",
      timestamp_us: Math.round(this.now() * 1000),
      button: 0,
    });
  }
}
