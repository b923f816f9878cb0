// Canvas renderer: perspective view from the headset origin looking down
// the viewing axis (+x into the screen), +z up. Everything drawn comes
// from UiClient state.

import { PLANE_PATCH, add, planeBasis, scale } from "./geometry.js";
import type { UiClient } from "./client.js";
import type { ShapeSpec, Vec3 } from "./protocol.js";

const FOCAL = 700;
const NEAR = 0.05;

export interface Camera {
  width: number;
  height: number;
}

function project(cam: Camera, p: Vec3): [number, number] | null {
  if (p[0] < NEAR) return null;
  const u = cam.width / 2 + (FOCAL * -p[1]) / p[0];
  const v = cam.height / 2 + (FOCAL * -p[2]) / p[0];
  return [u, v];
}

/** Inverse of project at a fixed depth, for pointer steering. */
export function unproject(cam: Camera, u: number, v: number, depth: number): Vec3 {
  const y = (-(u - cam.width / 2) * depth) / FOCAL;
  const z = (-(v - cam.height / 2) * depth) / FOCAL;
  return [depth, y, z];
}

function polyline(ctx: CanvasRenderingContext2D, cam: Camera, pts: Vec3[],
                  close: boolean): void {
  ctx.beginPath();
  let started = false;
  for (const p of pts) {
    const s = project(cam, p);
    if (!s) continue;
    if (started) ctx.lineTo(s[0], s[1]);
    else { ctx.moveTo(s[0], s[1]); started = true; }
  }
  if (close) ctx.closePath();
  ctx.stroke();
}

function drawShape(ctx: CanvasRenderingContext2D, cam: Camera,
                   shape: ShapeSpec, visible: boolean): void {
  ctx.save();
  ctx.strokeStyle = visible ? "#e05555" : "rgba(224,85,85,0.25)";
  ctx.fillStyle = visible ? "rgba(224,85,85,0.12)" : "rgba(224,85,85,0.03)";
  ctx.lineWidth = 2;
  if (!visible) ctx.setLineDash([6, 6]);

  if (shape.kind === "sphere") {
    const c = project(cam, shape.center);
    if (c) {
      const r = (FOCAL * shape.radius) / shape.center[0];
      ctx.beginPath();
      ctx.arc(c[0], c[1], r, 0, 2 * Math.PI);
      ctx.fill();
      ctx.stroke();
    }
  } else if (shape.kind === "plane") {
    const [u, v] = planeBasis(shape.normal);
    const h = PLANE_PATCH / 2;
    const corners = [
      add(shape.point, add(scale(u, h), scale(v, h))),
      add(shape.point, add(scale(u, -h), scale(v, h))),
      add(shape.point, add(scale(u, -h), scale(v, -h))),
      add(shape.point, add(scale(u, h), scale(v, -h))),
    ];
    polyline(ctx, cam, [...corners, corners[0]], true);
    // Frame around the patch, echoing the scene's framing.
    ctx.strokeStyle = visible ? "#5577e0" : "rgba(85,119,224,0.25)";
    const frame = corners.map((c) => add(c, scale(shape.normal, 0.001)));
    polyline(ctx, cam, [...frame, frame[0]], true);
  } else {
    const h = shape.half_extent;
    const cy = Math.cos(shape.yaw), sy = Math.sin(shape.yaw);
    const corner = (sx: number, sy2: number, sz: number): Vec3 => {
      const lx = sx * h, ly = sy2 * h;
      return [shape.center[0] + cy * lx - sy * ly,
              shape.center[1] + sy * lx + cy * ly,
              shape.center[2] + sz * h];
    };
    const c = [
      corner(-1, -1, -1), corner(1, -1, -1), corner(1, 1, -1), corner(-1, 1, -1),
      corner(-1, -1, 1), corner(1, -1, 1), corner(1, 1, 1), corner(-1, 1, 1),
    ];
    const edges: [number, number][] = [
      [0, 1], [1, 2], [2, 3], [3, 0],
      [4, 5], [5, 6], [6, 7], [7, 4],
      [0, 4], [1, 5], [2, 6], [3, 7],
    ];
    for (const [i, j] of edges) polyline(ctx, cam, [c[i], c[j]], false);
  }
  ctx.restore();
}

function drawMarker(ctx: CanvasRenderingContext2D, cam: Camera, p: Vec3,
                    color: string, size: number, square = false): void {
  const s = project(cam, p);
  if (!s) return;
  ctx.save();
  ctx.strokeStyle = color;
  ctx.fillStyle = color;
  ctx.lineWidth = 2;
  if (square) {
    ctx.strokeRect(s[0] - size, s[1] - size, 2 * size, 2 * size);
  } else {
    ctx.beginPath();
    ctx.moveTo(s[0] - size, s[1]);
    ctx.lineTo(s[0] + size, s[1]);
    ctx.moveTo(s[0], s[1] - size);
    ctx.lineTo(s[0], s[1] + size);
    ctx.stroke();
  }
  ctx.restore();
}

const PHASE_COLORS: Record<string, string> = {
  free: "#7a7a7a",
  approaching: "#d8a231",
  contact: "#37b24d",
};

export function renderScene(ctx: CanvasRenderingContext2D, client: UiClient,
                            cam: Camera): void {
  ctx.clearRect(0, 0, cam.width, cam.height);
  ctx.save();
  ctx.fillStyle = "#101318";
  ctx.fillRect(0, 0, cam.width, cam.height);
  ctx.restore();

  if (client.scene) drawShape(ctx, cam, client.scene.shape, client.scene.visible);

  if (client.trail.length > 1) {
    ctx.save();
    ctx.strokeStyle = "#ff6b6b";
    ctx.lineWidth = 1.5;
    polyline(ctx, cam, client.trail.map((t) => t.pos), false);
    ctx.restore();
  }

  if (client.lastRobot) {
    drawMarker(ctx, cam, client.lastRobot.ee_pos, "#4dabf7", 9, true);
  }
  drawMarker(ctx, cam, client.cursor, "#f8f9fa", 10);

  // HUD: distances, phase badge, state.
  ctx.save();
  ctx.font = "13px monospace";
  ctx.fillStyle = "#ced4da";
  const dv = client.localDistance();
  const dr = client.lastRobot ? client.lastRobot.d_r : null;
  ctx.fillText(`d_v ${dv === null ? "-" : dv.toFixed(4)} m`, 12, 22);
  ctx.fillText(`d_r ${dr === null ? "-" : dr.toFixed(4)} m`, 12, 40);
  if (client.lastRobot?.clamped) {
    ctx.fillStyle = "#ffa8a8";
    ctx.fillText("workspace clamped", 12, 58);
  }
  const phase = client.lastRobot ? client.lastRobot.phase : "free";
  ctx.fillStyle = PHASE_COLORS[phase] ?? "#7a7a7a";
  ctx.fillRect(cam.width - 140, 10, 130, 26);
  ctx.fillStyle = "#101318";
  ctx.font = "bold 13px monospace";
  ctx.fillText(phase.toUpperCase(), cam.width - 128, 28);
  ctx.restore();
}
