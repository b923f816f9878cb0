// Connection state machine and hand-update pump. No DOM in here: the
// socket is injected so the same class runs in the browser and in tests.

import { surfaceDistance } from "./geometry.js";
import {
  CalibResult, ErrorMsg, ObjectState, ProtocolError, RobotUpdate, Vec3,
  WireMessage, decodeLine, encodeLine,
} from "./protocol.js";

export type ConnectionState = "disconnected" | "connecting" | "live";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: ((err: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface TrailSample {
  t_ms: number;
  pos: Vec3;
  d_v: number;
  robot: RobotUpdate | null;
}

const DEFAULT_WS_PORT = 9751;

export function addressToUrl(address: string): string {
  if (address.startsWith("ws://") || address.startsWith("wss://")) return address;
  return address.includes(":")
    ? `ws://${address}`
    : `ws://${address}:${DEFAULT_WS_PORT}`;
}

export class UiClient {
  state: ConnectionState = "disconnected";
  cursor: Vec3 = [0.2, 0, 0];
  scene: ObjectState | null = null;
  lastRobot: RobotUpdate | null = null;
  lastCalib: CalibResult | null = null;
  lastError: ErrorMsg | null = null;
  drawing = false;
  trail: TrailSample[] = [];
  tickMs = 10;
  onchange: (() => void) | null = null;

  private socket: SocketLike | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private t_ms = 0;
  private pendingSwitch = false;
  private pendingHide = false;

  constructor(private makeSocket: SocketFactory) {}

  connect(address: string): void {
    this.disconnect();
    this.state = "connecting";
    this.lastError = null;
    const socket = this.makeSocket(addressToUrl(address));
    this.socket = socket;
    socket.onopen = () => {
      socket.send(encodeLine({
        type: "hello", version: 1, role: "hand", distance_authority: false,
      }));
      this.state = "live";
      this.t_ms = 0;
      this.startTicking();
      this.notify();
    };
    socket.onmessage = (event) => this.handleData(event.data);
    socket.onclose = () => {
      if (this.state !== "disconnected") {
        this.state = "disconnected";
        this.stopTicking();
        this.notify();
      }
    };
    socket.onerror = () => {
      if (this.state === "connecting") {
        this.lastError = { type: "error", code: "connect_failed",
                           detail: "could not reach the server" };
        this.state = "disconnected";
        this.notify();
      }
    };
    this.notify();
  }

  disconnect(): void {
    this.stopTicking();
    if (this.socket) {
      const socket = this.socket;
      this.socket = null;
      socket.onclose = null;
      socket.close();
    }
    this.state = "disconnected";
  }

  setCursor(p: Vec3): void {
    this.cursor = p;
  }

  pressSwitch(): void {
    this.pendingSwitch = true;
  }

  pressHide(): void {
    this.pendingHide = true;
  }

  setDraw(on: boolean): void {
    this.drawing = on;
  }

  clearTrail(): void {
    this.trail = [];
  }

  localDistance(): number | null {
    return this.scene ? surfaceDistance(this.scene.shape, this.cursor) : null;
  }

  /** One protocol tick: at most one hand update per call. */
  tickOnce(): void {
    if (this.state !== "live" || !this.socket || !this.scene) return;
    this.t_ms += this.tickMs;
    const d_v = surfaceDistance(this.scene.shape, this.cursor);
    const line = encodeLine({
      type: "hand", t_ms: this.t_ms, pos: this.cursor, d_v,
      buttons: { switch: this.pendingSwitch, hide: this.pendingHide,
                 draw: this.drawing },
    });
    this.pendingSwitch = false;
    this.pendingHide = false;
    this.socket.send(line);
    if (this.drawing) {
      this.trail.push({ t_ms: this.t_ms, pos: this.cursor, d_v,
                        robot: this.lastRobot });
    }
  }

  /** Recording-schema NDJSON of the drawn trail, loadable by `ethd metrics`.
   * The identity calibration of the stock server config is assumed for the
   * robot-frame hand column. */
  exportTrailNdjson(): string {
    if (!this.scene) throw new Error("no scene to export against");
    if (this.trail.length === 0) throw new Error("trail is empty");
    const header = {
      type: "header",
      config: { object_set: [this.scene.shape] },
      object_index: 0,
      visible: this.scene.visible,
      robot: { ee_pos: [0, 0, 0], ee_facing: [-1, 0, 0], speed: 0 },
      t_ms: 0,
    };
    const lines = [JSON.stringify(header)];
    for (const s of this.trail) {
      lines.push(JSON.stringify({
        type: "sample", t_ms: s.t_ms, hand_v: s.pos, hand_r: s.pos,
        ee_pos: s.robot ? s.robot.ee_pos : [0, 0, 0],
        d_v: s.d_v, d_r: s.robot ? s.robot.d_r : 0,
        phase: s.robot ? s.robot.phase : "free",
        drawing: true,
      }));
    }
    return lines.join("\n") + "\n";
  }

  private startTicking(): void {
    this.stopTicking();
    this.timer = setInterval(() => this.tickOnce(), this.tickMs);
  }

  private stopTicking(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private handleData(data: unknown): void {
    const text = typeof data === "string" ? data : String(data);
    for (const line of text.split("\n")) {
      if (!line.trim()) continue;
      let msg: WireMessage;
      try {
        msg = decodeLine(line);
      } catch (err) {
        if (err instanceof ProtocolError) continue;  // never crash the UI
        throw err;
      }
      this.apply(msg);
    }
    this.notify();
  }

  /** Rendered facts come only from what the server last said. */
  private apply(msg: WireMessage): void {
    switch (msg.type) {
      case "robot":
        this.lastRobot = msg;
        break;
      case "object":
        this.scene = msg;
        break;
      case "calib_result":
        this.lastCalib = msg;
        break;
      case "error":
        this.lastError = msg;
        break;
      default:
        break;  // hand/hello/calib_pair are client-to-server only
    }
  }

  private notify(): void {
    if (this.onchange) this.onchange();
  }
}
