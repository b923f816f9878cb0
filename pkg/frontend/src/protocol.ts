// Wire schema: newline-delimited JSON, one object per line, mirroring the
// server's codec. Unknown extra fields are ignored; unknown types and
// malformed payloads throw ProtocolError.

export type Vec3 = [number, number, number];

export interface Buttons {
  switch: boolean;
  hide: boolean;
  draw: boolean;
}

export interface HandUpdate {
  type: "hand";
  t_ms: number;
  pos: Vec3;
  d_v: number;
  buttons: Buttons;
}

export type ContactPhase = "free" | "approaching" | "contact";

export interface RobotUpdate {
  type: "robot";
  t_ms: number;
  ee_pos: Vec3;
  d_r: number;
  phase: ContactPhase;
  clamped: boolean;
}

export type ShapeSpec =
  | { kind: "plane"; point: Vec3; normal: Vec3 }
  | { kind: "sphere"; center: Vec3; radius: number }
  | { kind: "cube"; center: Vec3; half_extent: number; yaw: number };

export interface ObjectState {
  type: "object";
  shape: ShapeSpec;
  visible: boolean;
}

export interface CalibPair {
  type: "calib_pair";
  a: Vec3;
  b: Vec3;
}

export interface CalibResult {
  type: "calib_result";
  r: [Vec3, Vec3, Vec3];
  t: Vec3;
  rmse: number;
  n: number;
}

export interface Hello {
  type: "hello";
  version: number;
  role: "hand" | "observer";
  distance_authority: boolean;
}

export interface ErrorMsg {
  type: "error";
  code: string;
  detail: string;
}

export type WireMessage =
  | HandUpdate | RobotUpdate | ObjectState | CalibPair | CalibResult
  | Hello | ErrorMsg;

export class ProtocolError extends Error {
  constructor(public code: string, detail: string) {
    super(detail);
  }
}

function finite(value: unknown, name: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new ProtocolError("bad_value", `field ${name} must be a finite number`);
  }
  return value;
}

function integer(value: unknown, name: string): number {
  const out = finite(value, name);
  if (!Number.isInteger(out)) {
    throw new ProtocolError("bad_value", `field ${name} must be an integer`);
  }
  return out;
}

function bool(value: unknown, name: string, fallback?: boolean): boolean {
  if (value === undefined && fallback !== undefined) return fallback;
  if (typeof value !== "boolean") {
    throw new ProtocolError("bad_value", `field ${name} must be a boolean`);
  }
  return value;
}

function vec3(value: unknown, name: string): Vec3 {
  if (!Array.isArray(value) || value.length !== 3) {
    throw new ProtocolError("bad_arity", `field ${name} must be a 3-vector`);
  }
  return [finite(value[0], name), finite(value[1], name), finite(value[2], name)];
}

function require(obj: Record<string, unknown>, name: string): unknown {
  if (!(name in obj)) {
    throw new ProtocolError("missing_field", `missing required field: ${name}`);
  }
  return obj[name];
}

function parseShape(value: unknown): ShapeSpec {
  if (typeof value !== "object" || value === null) {
    throw new ProtocolError("bad_value", "shape must be an object");
  }
  const obj = value as Record<string, unknown>;
  switch (obj.kind) {
    case "plane":
      return { kind: "plane", point: vec3(require(obj, "point"), "point"),
               normal: vec3(require(obj, "normal"), "normal") };
    case "sphere":
      return { kind: "sphere", center: vec3(require(obj, "center"), "center"),
               radius: finite(require(obj, "radius"), "radius") };
    case "cube":
      return { kind: "cube", center: vec3(require(obj, "center"), "center"),
               half_extent: finite(require(obj, "half_extent"), "half_extent"),
               yaw: finite(require(obj, "yaw"), "yaw") };
    default:
      throw new ProtocolError("bad_value", `unknown shape kind: ${obj.kind}`);
  }
}

export function decodeLine(line: string): WireMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch (err) {
    throw new ProtocolError("bad_json", `malformed JSON: ${err}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ProtocolError("bad_json", "message must be a JSON object");
  }
  const msg = obj as Record<string, unknown>;
  switch (msg.type) {
    case "hand": {
      const rawButtons = require(msg, "buttons");
      if (typeof rawButtons !== "object" || rawButtons === null) {
        throw new ProtocolError("bad_value", "field buttons must be an object");
      }
      const b = rawButtons as Record<string, unknown>;
      const d_v = finite(require(msg, "d_v"), "d_v");
      if (d_v < 0) throw new ProtocolError("bad_value", "d_v must be >= 0");
      return {
        type: "hand", t_ms: integer(require(msg, "t_ms"), "t_ms"),
        pos: vec3(require(msg, "pos"), "pos"), d_v,
        buttons: { switch: bool(b.switch, "switch", false),
                   hide: bool(b.hide, "hide", false),
                   draw: bool(b.draw, "draw", false) },
      };
    }
    case "robot": {
      const phase = require(msg, "phase");
      if (phase !== "free" && phase !== "approaching" && phase !== "contact") {
        throw new ProtocolError("bad_value", `unknown phase: ${phase}`);
      }
      const d_r = finite(require(msg, "d_r"), "d_r");
      if (d_r < 0) throw new ProtocolError("bad_value", "d_r must be >= 0");
      return {
        type: "robot", t_ms: integer(require(msg, "t_ms"), "t_ms"),
        ee_pos: vec3(require(msg, "ee_pos"), "ee_pos"), d_r,
        phase, clamped: bool(require(msg, "clamped"), "clamped"),
      };
    }
    case "object":
      return { type: "object", shape: parseShape(require(msg, "shape")),
               visible: bool(require(msg, "visible"), "visible") };
    case "calib_pair":
      return { type: "calib_pair", a: vec3(require(msg, "a"), "a"),
               b: vec3(require(msg, "b"), "b") };
    case "calib_result": {
      const raw = require(msg, "r");
      if (!Array.isArray(raw) || raw.length !== 3) {
        throw new ProtocolError("bad_arity", "field r must be a 3x3 matrix");
      }
      const rows = raw.map((row, i) => vec3(row, `r[${i}]`)) as [Vec3, Vec3, Vec3];
      return { type: "calib_result", r: rows, t: vec3(require(msg, "t"), "t"),
               rmse: finite(require(msg, "rmse"), "rmse"),
               n: integer(require(msg, "n"), "n") };
    }
    case "hello": {
      const role = require(msg, "role");
      if (role !== "hand" && role !== "observer") {
        throw new ProtocolError("bad_value", `unknown role: ${role}`);
      }
      return { type: "hello", version: integer(require(msg, "version"), "version"),
               role, distance_authority: bool(msg.distance_authority,
                                              "distance_authority", false) };
    }
    case "error": {
      const code = require(msg, "code");
      if (typeof code !== "string") {
        throw new ProtocolError("bad_value", "error code must be a string");
      }
      const detail = msg.detail ?? "";
      if (typeof detail !== "string") {
        throw new ProtocolError("bad_value", "error detail must be a string");
      }
      return { type: "error", code, detail };
    }
    default:
      throw new ProtocolError("unknown_type", `unknown message type: ${msg.type}`);
  }
}

export function encodeLine(msg: WireMessage): string {
  const check = (values: number[]) => {
    for (const v of values) {
      if (!Number.isFinite(v)) {
        throw new ProtocolError("non_finite", "non-finite number in message");
      }
    }
  };
  if (msg.type === "hand") check([...msg.pos, msg.d_v, msg.t_ms]);
  if (msg.type === "robot") check([...msg.ee_pos, msg.d_r, msg.t_ms]);
  if (msg.type === "calib_pair") check([...msg.a, ...msg.b]);
  return JSON.stringify(msg) + "\n";
}
