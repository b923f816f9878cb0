// Client-side copy of the shape math so the cursor's distance readout and
// the HandUpdate d_v agree with the server to floating-point noise.
// Vertical axis is +z; the cube yaws about it. The plane renders as a
// 0.6 m square patch but measures distance against the infinite plane.

import type { ShapeSpec, Vec3 } from "./protocol.js";

export const PLANE_PATCH = 0.6;

export const add = (a: Vec3, b: Vec3): Vec3 => [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
export const sub = (a: Vec3, b: Vec3): Vec3 => [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
export const scale = (a: Vec3, s: number): Vec3 => [a[0] * s, a[1] * s, a[2] * s];
export const dot = (a: Vec3, b: Vec3): number => a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
export const norm = (a: Vec3): number => Math.sqrt(dot(a, a));
export const cross = (a: Vec3, b: Vec3): Vec3 => [
  a[1] * b[2] - a[2] * b[1],
  a[2] * b[0] - a[0] * b[2],
  a[0] * b[1] - a[1] * b[0],
];

export function normalized(a: Vec3): Vec3 {
  const n = norm(a);
  if (n === 0) throw new Error("cannot normalize a zero vector");
  return [a[0] / n, a[1] / n, a[2] / n];
}

function rotZ(yaw: number, v: Vec3): Vec3 {
  const c = Math.cos(yaw), s = Math.sin(yaw);
  return [c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]];
}

export interface SurfaceQuery {
  nearest: Vec3;
  normal: Vec3;
  distance: number;
}

export function nearestPoint(shape: ShapeSpec, p: Vec3): SurfaceQuery {
  if (shape.kind === "plane") {
    const d = dot(sub(p, shape.point), shape.normal);
    return { nearest: sub(p, scale(shape.normal, d)), normal: shape.normal,
             distance: Math.abs(d) };
  }
  if (shape.kind === "sphere") {
    const v = sub(p, shape.center);
    const r = norm(v);
    if (r === 0) {
      return { nearest: add(shape.center, [0, 0, shape.radius]),
               normal: [0, 0, 1], distance: shape.radius };
    }
    const n = scale(v, 1 / r);
    return { nearest: add(shape.center, scale(n, shape.radius)), normal: n,
             distance: Math.abs(r - shape.radius) };
  }
  // cube
  const h = shape.half_extent;
  const q = rotZ(-shape.yaw, sub(p, shape.center));
  const outside = [0, 1, 2].filter((i) => Math.abs(q[i]) > h);
  let near: Vec3;
  let nLocal: Vec3 = [0, 0, 0];
  let distance: number;
  if (outside.length > 0) {
    near = q.map((c) => Math.min(Math.max(c, -h), h)) as Vec3;
    distance = norm(sub(q, near));
    for (const i of outside) nLocal[i] = Math.sign(q[i]);
  } else {
    const gaps = q.map((c) => h - Math.abs(c));
    const g = Math.min(...gaps);
    const atBound = g === 0
      ? [0, 1, 2].filter((i) => gaps[i] === 0)
      : [gaps.indexOf(g)];
    const k = atBound[0];
    near = [...q] as Vec3;
    near[k] = q[k] !== 0 ? Math.sign(q[k]) * h : h;
    distance = g;
    for (const i of atBound) nLocal[i] = q[i] !== 0 ? Math.sign(q[i]) : 1;
  }
  nLocal = normalized(nLocal);
  return {
    nearest: add(shape.center, rotZ(shape.yaw, near)),
    normal: rotZ(shape.yaw, nLocal),
    distance,
  };
}

export function surfaceDistance(shape: ShapeSpec, p: Vec3): number {
  return nearestPoint(shape, p).distance;
}

// Orthonormal in-plane basis, matching the server's construction.
export function planeBasis(normal: Vec3): [Vec3, Vec3] {
  const ref: Vec3 = Math.abs(normal[2]) < 0.9 ? [0, 0, 1] : [1, 0, 0];
  const u = normalized(cross(normal, ref));
  const v = cross(normal, u);
  return [u, v];
}
