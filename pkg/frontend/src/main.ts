// Browser entry point.  URL query parameters configure the client:
//   ?participant=0&name=alice&gateway=ws://127.0.0.1:47900&head=pointer-look

import { GatewayClient, WebSocketTransport } from "./client.js";
import { PointerInput } from "./input.js";
import { instructorPanel } from "./panel.js";
import { paintScene } from "./render.js";
import { ROLE_INSTRUCTOR } from "./schema.js";
import { buildScene, HeadProxyMode, ViewConfig } from "./scene.js";

function query(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

function main(): void {
  const participant = Number(query("participant", "0"));
  const name = query("name", `browser-${participant}`);
  const gateway = query("gateway", `ws://${window.location.hostname || "127.0.0.1"}:47900`);
  const headProxy = query("head", "fixed") as HeadProxyMode;

  const canvas = document.getElementById("scene") as HTMLCanvasElement;
  const panelDiv = document.getElementById("panel") as HTMLDivElement;
  const statusDiv = document.getElementById("status") as HTMLDivElement;
  const toastDiv = document.getElementById("toast") as HTMLDivElement;

  const transport = new WebSocketTransport(gateway);
  const client = new GatewayClient(transport, participant, name);
  const mirror = client.mirror;
  const view: ViewConfig = { role: 0, headProxy, pointerNdc: [0, 0] };
  const input = new PointerInput(mirror, view, {
    sendPose: (msg) => client.send({ ...msg, seq: 0 }),
    sendButton: (msg) => client.send({ ...msg, seq: 0 }),
  });

  transport.onOpen(() => client.join());
  client.onDisconnect = () => {
    statusDiv.textContent = "disconnected from gateway";
    statusDiv.className = "banner error";
  };
  client.onToast = (message) => {
    toastDiv.textContent = message;
    toastDiv.style.opacity = "1";
    setTimeout(() => (toastDiv.style.opacity = "0"), 2500);
  };
  client.onUpdate = () => {
    if (mirror.role !== null) view.role = mirror.role;
  };
  let embodimentSeq = 0;
  setInterval(() => client.sendEmbodiment(++embodimentSeq, view.pointerNdc), 500);

  const ndcFromEvent = (ev: MouseEvent): [number, number] => {
    const rect = canvas.getBoundingClientRect();
    return [((ev.clientX - rect.left) / rect.width) * 2 - 1,
            1 - ((ev.clientY - rect.top) / rect.height) * 2];
  };
  canvas.addEventListener("mousemove", (ev) => {
    const [x, y] = ndcFromEvent(ev);
    input.onPointerMove(x, y);
  });
  canvas.addEventListener("click", (ev) => {
    const [x, y] = ndcFromEvent(ev);
    input.onClick(x, y);
  });

  function renderPanel(): void {
    if (mirror.role !== ROLE_INSTRUCTOR || mirror.solution.length === 0) {
      panelDiv.innerHTML = "";
      return;
    }
    const model = instructorPanel(mirror);
    const rows = model.steps.map((s) =>
      `<li class="${s.status}">step ${s.index}: cube ${s.cube} to (${s.col}, ${s.row})</li>`);
    panelDiv.innerHTML =
      `<h3>task ${model.taskIndex || "training"}${model.done ? " — done" : ""}</h3>` +
      `<ol>${rows.join("")}</ol>`;
  }

  function frame(): void {
    const roleName = mirror.role === null ? "joining..."
      : mirror.role === ROLE_INSTRUCTOR ? "instructor" : "assembler";
    const cond = mirror.config?.conditions.find((c) => c.code === mirror.conditionCode);
    statusDiv.textContent =
      `${name}: ${roleName}  |  condition ${cond?.name ?? cond?.label ?? "?"}` +
      `${mirror.sessionOver ? "  |  session complete" : ""}`;
    paintScene(canvas, buildScene(mirror, view, Date.now()));
    renderPanel();
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

main();
