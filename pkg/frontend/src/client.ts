// Gateway connection: join, pump frames into the mirror, stamp outgoing
// sequence numbers.  The transport is injected so tests can drive the whole
// client without sockets.

import { ClientMessage, parseServerMessage } from "./schema.js";
import { SessionMirror } from "./state.js";

export interface Transport {
  send(text: string): void;
  close(): void;
  onMessage(handler: (text: string) => void): void;
  onClose(handler: () => void): void;
}

export class WebSocketTransport implements Transport {
  private socket: WebSocket;

  constructor(url: string) {
    this.socket = new WebSocket(url);
  }

  send(text: string): void {
    this.socket.send(text);
  }

  close(): void {
    this.socket.close();
  }

  onMessage(handler: (text: string) => void): void {
    this.socket.onmessage = (ev) => handler(String(ev.data));
  }

  onClose(handler: () => void): void {
    this.socket.onclose = () => handler();
  }

  onOpen(handler: () => void): void {
    this.socket.onopen = () => handler();
  }
}

export class GatewayClient {
  mirror: SessionMirror;
  private reliableSeq = 1;
  private unreliableSeq = 1;
  onUpdate: () => void = () => {};
  onToast: (message: string) => void = () => {};
  onDisconnect: () => void = () => {};

  constructor(private transport: Transport, participant: number,
              private name: string, now: () => number = () => Date.now()) {
    this.mirror = new SessionMirror(participant, now);
    transport.onMessage((text) => this.handle(text));
    transport.onClose(() => this.onDisconnect());
  }

  join(): void {
    // joining (or re-joining after a disconnect) asks the server for a
    // role assignment and a fresh snapshot; the client owns no state
    this.send({ type: "join", seq: 0, participant: this.mirror.participant,
                name: this.name });
  }

  send(msg: ClientMessage): void {
    // joins and embodiment frames ride the reliable channel's seq space
    const reliable = msg.type === "join" || msg.type === "embodiment_frame";
    const seq = reliable ? this.reliableSeq++ : this.unreliableSeq++;
    this.transport.send(JSON.stringify({ ...msg, seq }));
  }

  /** Synthetic stand-in for the tracked person: a small skeleton standing at
   * the stance mat, hand trailing the pointer.  Real capture is out of scope. */
  sendEmbodiment(frameSeq: number, pointerNdc: [number, number]): void {
    const config = this.mirror.config;
    if (!config || this.mirror.role === null) return;
    const z = (config.volume.depth / 2 + config.stance_m)
      * (this.mirror.role === 0 ? -1 : 1);
    const reach = this.mirror.role === 0 ? 0.35 : -0.35;
    this.send({
      type: "embodiment_frame",
      seq: 0,
      frame_seq: frameSeq,
      timestamp_us: Math.round(Date.now() * 1000),
      joints: [
        { joint_id: 0, position: [pointerNdc[0] * 0.1, 0.35, z] },
        { joint_id: 1, position: [-0.22, -0.1, z + reach * 0.4] },
        { joint_id: 2, position: [0.2 + pointerNdc[0] * 0.15,
                                  pointerNdc[1] * 0.2, z + reach] },
        { joint_id: 3, position: [0, 0, z] },
      ],
      points: [],
    });
  }

  handle(text: string): void {
    const msg = parseServerMessage(text);
    this.mirror.apply(msg);
    if (msg.type === "toast") this.onToast(msg.message);
    this.onUpdate();
  }
}
