// DOM wiring: connect screen, pointer steering (lateral), wheel/keys
// (depth), object buttons, draw toggle, trail export.

import { UiClient } from "./client.js";
import { renderScene, unproject } from "./render.js";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const addressInput = document.getElementById("address") as HTMLInputElement;
const connectBtn = document.getElementById("connect") as HTMLButtonElement;
const switchBtn = document.getElementById("switch") as HTMLButtonElement;
const hideBtn = document.getElementById("hide") as HTMLButtonElement;
const drawBtn = document.getElementById("draw") as HTMLButtonElement;
const exportBtn = document.getElementById("export") as HTMLButtonElement;
const statusLine = document.getElementById("status") as HTMLElement;

// Native WebSocket matches SocketLike at runtime; the handler signatures
// differ only in the event parameter our closures ignore.
const client = new UiClient(
  (url) => new WebSocket(url) as unknown as import("./client.js").SocketLike);

let depth = 0.3;
const DEPTH_MIN = 0.07;
const DEPTH_MAX = 1.4;

function cam() {
  return { width: canvas.width, height: canvas.height };
}

connectBtn.addEventListener("click", () => {
  if (client.state === "live") {
    client.disconnect();
  } else {
    client.connect(addressInput.value.trim() || "127.0.0.1");
  }
  refreshControls();
});

switchBtn.addEventListener("click", () => client.pressSwitch());
hideBtn.addEventListener("click", () => client.pressHide());

drawBtn.addEventListener("click", () => {
  client.setDraw(!client.drawing);
  drawBtn.textContent = client.drawing ? "drawing: on" : "drawing: off";
});

exportBtn.addEventListener("click", () => {
  try {
    const ndjson = client.exportTrailNdjson();
    const blob = new Blob([ndjson], { type: "application/x-ndjson" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "trail.ndjson";
    link.click();
    URL.revokeObjectURL(link.href);
  } catch (err) {
    statusLine.textContent = `export failed: ${err}`;
  }
});

canvas.addEventListener("pointermove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const u = ((ev.clientX - rect.left) / rect.width) * canvas.width;
  const v = ((ev.clientY - rect.top) / rect.height) * canvas.height;
  client.setCursor(unproject(cam(), u, v, depth));
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  depth = Math.min(DEPTH_MAX, Math.max(DEPTH_MIN, depth + ev.deltaY * 0.0004));
  client.setCursor([depth, client.cursor[1], client.cursor[2]]);
}, { passive: false });

window.addEventListener("keydown", (ev) => {
  if (ev.key === "w") depth = Math.min(DEPTH_MAX, depth + 0.01);
  if (ev.key === "s") depth = Math.max(DEPTH_MIN, depth - 0.01);
  if (ev.key === "d") drawBtn.click();
  client.setCursor([depth, client.cursor[1], client.cursor[2]]);
});

function refreshControls() {
  connectBtn.textContent = client.state === "live" ? "disconnect" : "connect";
  const live = client.state === "live";
  for (const b of [switchBtn, hideBtn, drawBtn, exportBtn]) b.disabled = !live;
}

client.onchange = () => {
  let status = client.state as string;
  if (client.lastError) {
    status += ` | error ${client.lastError.code}: ${client.lastError.detail}`;
  }
  if (client.lastCalib) {
    status += ` | calibrated (rmse ${client.lastCalib.rmse.toExponential(2)} m,`
      + ` n=${client.lastCalib.n})`;
  }
  statusLine.textContent = status;
  refreshControls();
};

function frame() {
  renderScene(ctx, client, cam());
  requestAnimationFrame(frame);
}

refreshControls();
frame();
