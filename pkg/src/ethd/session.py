"""Tick-loop orchestration: geometry, placement, robot stepping, calibration
capture, object lifecycle, recording, and replay.

One Session instance is owned by exactly one execution context. Everything
here is synchronous and deterministic; the network layer feeds messages in
through queues and never touches session internals directly.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .calibration import (CalibrationSample, RigidTransform, TooFewSamplesError,
                          alignment_rmse, apply_transform, estimate_transform)
from .control import (ContactPhase, PlacementInput, PlacementTarget,
                      contact_phase, placement_target, viewing_axis)
from .geometry import (Cube, Plane, Shape, Sphere, Vec3, nearest_point,
                       shape_from_dict, shape_to_dict, vec3_from_seq)
from .protocol import (Buttons, CalibPair, CalibResult, HandUpdate, ObjectState,
                       RobotUpdate)
from .robotsim import RobotLimits, RobotState, detect_contact, step

log = logging.getLogger(__name__)

# Objects sit this far in front of the headset origin along the viewing axis.
DEFAULT_OBJECT_DISTANCE = 0.5


class SessionError(Exception):
    pass


class UncalibratedError(SessionError):
    pass


class RecordError(SessionError):
    pass


def default_object_set(o_headset: Vec3 = Vec3(0.0, 0.0, 0.0),
                       toward: Vec3 = Vec3(1.0, 0.0, 0.0)) -> list[Shape]:
    """The three stock objects, anchored in front of the headset: a vertical
    plane facing the user, a sphere, and a 45-degree rotated cube."""
    axis = toward.normalized()
    anchor = o_headset + axis * DEFAULT_OBJECT_DISTANCE
    return [
        Plane(point=anchor, normal=-axis),
        Sphere(center=anchor, radius=0.15),
        Cube(center=anchor, half_extent=0.15, yaw=math.pi / 4),
    ]


@dataclass
class SessionConfig:
    tick_ms: int = 10
    limits: RobotLimits = field(default_factory=RobotLimits)
    eps_contact: float = 0.002
    o_robot: Vec3 = field(default_factory=lambda: Vec3(1.1, 0.0, 0.0))
    o_headset: Vec3 = field(default_factory=lambda: Vec3(0.0, 0.0, 0.0))
    calib: Optional[RigidTransform] = None
    object_set: list[Shape] = field(default_factory=default_object_set)
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.tick_ms < 1:
            raise ValueError(f"tick_ms must be >= 1, got {self.tick_ms!r}")
        if not (self.eps_contact > 0.0):
            raise ValueError(f"eps_contact must be > 0, got {self.eps_contact!r}")
        if (self.o_robot - self.o_headset).norm() <= 1e-6:
            raise ValueError("o_robot and o_headset must not coincide")
        if not self.object_set:
            raise ValueError("object_set must not be empty")

    def to_dict(self) -> dict:
        return {
            "tick_ms": self.tick_ms,
            "limits": {
                "v_max": self.limits.v_max, "a_max": self.limits.a_max,
                "reach": self.limits.reach,
                "workspace_origin": list(self.limits.workspace_origin),
            },
            "eps_contact": self.eps_contact,
            "o_robot": list(self.o_robot),
            "o_headset": list(self.o_headset),
            "calib": self.calib.to_dict() if self.calib is not None else None,
            "object_set": [shape_to_dict(s) for s in self.object_set],
            "rng_seed": self.rng_seed,
        }

    @staticmethod
    def from_dict(data: dict) -> "SessionConfig":
        lim = data.get("limits", {})
        limits = RobotLimits(
            v_max=float(lim.get("v_max", 1.0)), a_max=float(lim.get("a_max", 5.0)),
            reach=float(lim.get("reach", 0.9)),
            workspace_origin=vec3_from_seq(lim.get("workspace_origin", [0, 0, 0]),
                                           "workspace_origin"),
        )
        calib = data.get("calib")
        return SessionConfig(
            tick_ms=int(data.get("tick_ms", 10)),
            limits=limits,
            eps_contact=float(data.get("eps_contact", 0.002)),
            o_robot=vec3_from_seq(data.get("o_robot", [1.1, 0, 0]), "o_robot"),
            o_headset=vec3_from_seq(data.get("o_headset", [0, 0, 0]), "o_headset"),
            calib=RigidTransform.from_dict(calib) if calib is not None else None,
            object_set=[shape_from_dict(s) for s in data.get("object_set", [])]
            or default_object_set(),
            rng_seed=int(data.get("rng_seed", 0)),
        )


def load_config(path: str) -> SessionConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return SessionConfig.from_dict(json.load(fh))


def save_config(path: str, config: SessionConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2)
        fh.write("\n")


class TrajectorySample(NamedTuple):
    t_ms: int
    hand_v: Vec3
    hand_r: Vec3
    ee_pos: Vec3
    d_v: float
    d_r: float
    phase: ContactPhase
    drawing: bool


@dataclass
class TrajectoryRecord:
    samples: list[TrajectorySample]

    def __post_init__(self) -> None:
        times = [s.t_ms for s in self.samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("trajectory timestamps must be strictly increasing")


class SurfaceErrorStats(NamedTuple):
    mean: float
    max: float
    n: int


def trajectory_surface_error(rec: TrajectoryRecord, shape: Shape) -> SurfaceErrorStats:
    """Mean/max hand-to-surface distance over the drawn samples."""
    dists = [nearest_point(shape, s.hand_v).distance for s in rec.samples if s.drawing]
    if not dists:
        raise RecordError("record contains no drawing samples")
    return SurfaceErrorStats(mean=float(np.mean(dists)), max=float(np.max(dists)),
                             n=len(dists))


class Session:
    """Single-owner simulation loop binding geometry, control, and the robot."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.axis = viewing_axis(config.o_robot, config.o_headset)
        self.rng = np.random.default_rng(config.rng_seed)
        self.calib = config.calib
        self.object_index = 0
        self.visible = True
        self.robot = RobotState(ee_pos=config.limits.workspace_origin,
                                ee_facing=-self.axis)
        self.t_ms = 0
        self.distance_authority = False
        self.last_target: Optional[PlacementTarget] = None
        self.parity_last: Optional[float] = None
        self.parity_max = 0.0
        self._prev_buttons = Buttons()
        self._recording: Optional[list[TrajectorySample]] = None
        self._rec_header: Optional[dict] = None
        self._calib_buffer: list[CalibrationSample] = []
        self._capturing = False
        self._broadcasts: list = []

    @property
    def shape(self) -> Shape:
        return self.config.object_set[self.object_index]

    @property
    def calibrated(self) -> bool:
        return self.calib is not None

    @property
    def object_state(self) -> ObjectState:
        return ObjectState(shape=self.shape, visible=self.visible)

    # -- object lifecycle ---------------------------------------------------

    def switch_object(self) -> Shape:
        """Uniform random pick from the object set using the session RNG."""
        self.object_index = int(self.rng.integers(len(self.config.object_set)))
        self._broadcasts.append(self.object_state)
        return self.shape

    def set_visibility(self, visible: bool) -> ObjectState:
        """Haptics are unaffected; only the rendered state changes."""
        self.visible = bool(visible)
        state = self.object_state
        self._broadcasts.append(state)
        return state

    def drain_broadcasts(self) -> list:
        out, self._broadcasts = self._broadcasts, []
        return out

    # -- calibration capture ------------------------------------------------

    def begin_calibration(self) -> None:
        """Enter capture mode: drops the current calibration and trajectories."""
        self.calib = None
        self._calib_buffer = []
        self._capturing = True
        if self._recording is not None:
            self.start_recording()  # discard pre-capture samples, re-snapshot

    def add_calibration_pairs(self, pairs: Iterable[CalibPair | CalibrationSample],
                              ) -> Optional[CalibResult]:
        """Accumulate pairs; refit once at least 3 are buffered.

        Returns the latest result, or None while the buffer is still too
        small or degenerate.
        """
        if not self._capturing:
            self.begin_calibration()
        for p in pairs:
            self._calib_buffer.append(CalibrationSample(a=p.a, b=p.b))
        if len(self._calib_buffer) < 3:
            return None
        try:
            tf = estimate_transform(self._calib_buffer)
        except TooFewSamplesError:
            return None
        rmse = alignment_rmse(tf, self._calib_buffer)
        self.calib = tf
        result = CalibResult.from_transform(tf, rmse=rmse, n=len(self._calib_buffer))
        self._broadcasts.append(result)
        return result

    def finish_calibration(self) -> None:
        self._capturing = False

    def calibration_capture(self, pairs: Iterable[CalibPair | CalibrationSample],
                            ) -> CalibResult:
        """One-shot capture: accumulate the whole stream, fit, store, emit."""
        self.begin_calibration()
        result = self.add_calibration_pairs(pairs)
        self.finish_calibration()
        if result is None:
            raise TooFewSamplesError(
                f"need at least 3 calibration pairs, got {len(self._calib_buffer)}")
        return result

    # -- the tick -----------------------------------------------------------

    def tick(self, hand: HandUpdate) -> RobotUpdate:
        """Advance one tick from the freshest hand state."""
        if self.calib is None:
            raise UncalibratedError("session is not calibrated")

        self._handle_button_edges(hand.buttons)

        query = nearest_point(self.shape, hand.pos)
        d_v_server = query.distance
        self.parity_last = abs(hand.d_v - d_v_server)
        self.parity_max = max(self.parity_max, self.parity_last)
        if self.parity_last > 1e-6:
            log.debug("client/server d_v parity gap: %.3g m", self.parity_last)
        d_v = hand.d_v if self.distance_authority else d_v_server

        hand_r = apply_transform(self.calib, hand.pos)
        inp = PlacementInput(hand_r=hand_r, d_v=d_v, axis=self.axis,
                             surface_normal_v=query.normal)
        target = placement_target(inp, self.calib)
        self.last_target = target

        self.robot = step(self.robot, target, self.config.limits,
                          self.config.tick_ms / 1000.0)
        d_r = (self.robot.ee_pos - hand_r).norm()
        phase = contact_phase(d_v, d_r, self.config.eps_contact)
        self.robot = replace(
            self.robot,
            in_contact=detect_contact(self.robot.ee_pos, hand_r, self.config.eps_contact))

        self.t_ms += self.config.tick_ms
        update = RobotUpdate(t_ms=self.t_ms, ee_pos=self.robot.ee_pos, d_r=d_r,
                             phase=phase, clamped=self.robot.clamped)
        if self._recording is not None:
            self._recording.append(TrajectorySample(
                t_ms=self.t_ms, hand_v=hand.pos, hand_r=hand_r,
                ee_pos=self.robot.ee_pos, d_v=d_v, d_r=d_r, phase=phase,
                drawing=hand.buttons.draw))
        return update

    def _handle_button_edges(self, buttons: Buttons) -> None:
        if buttons.switch and not self._prev_buttons.switch:
            self.switch_object()
        if buttons.hide and not self._prev_buttons.hide:
            self.set_visibility(not self.visible)
        self._prev_buttons = buttons

    # -- recording ------------------------------------------------------------

    def start_recording(self) -> None:
        self._recording = []
        self._rec_header = {
            "config": self.config.to_dict(),
            "object_index": self.object_index,
            "visible": self.visible,
            "robot": {"ee_pos": list(self.robot.ee_pos),
                      "ee_facing": list(self.robot.ee_facing),
                      "speed": self.robot.speed},
            "t_ms": self.t_ms,
        }

    def stop_recording(self) -> "Episode":
        if self._recording is None or self._rec_header is None:
            raise RecordError("no recording in progress")
        episode = Episode(header=self._rec_header,
                          record=TrajectoryRecord(self._recording))
        self._recording = None
        self._rec_header = None
        return episode


# -- recording files ----------------------------------------------------------
#
# NDJSON: a header line opens each episode, then one sample line per tick.
# Multiple episodes may share a file; a new header starts the next one.

@dataclass
class Episode:
    header: dict
    record: TrajectoryRecord

    @property
    def shape(self) -> Shape:
        cfg = self.header["config"]
        return shape_from_dict(cfg["object_set"][self.header["object_index"]])


def _sample_to_dict(s: TrajectorySample) -> dict:
    return {"type": "sample", "t_ms": s.t_ms, "hand_v": list(s.hand_v),
            "hand_r": list(s.hand_r), "ee_pos": list(s.ee_pos), "d_v": s.d_v,
            "d_r": s.d_r, "phase": s.phase.value, "drawing": s.drawing}


def _sample_from_dict(obj: dict) -> TrajectorySample:
    return TrajectorySample(
        t_ms=int(obj["t_ms"]), hand_v=vec3_from_seq(obj["hand_v"], "hand_v"),
        hand_r=vec3_from_seq(obj["hand_r"], "hand_r"),
        ee_pos=vec3_from_seq(obj["ee_pos"], "ee_pos"), d_v=float(obj["d_v"]),
        d_r=float(obj["d_r"]), phase=ContactPhase(obj["phase"]),
        drawing=bool(obj["drawing"]))


def write_episodes(path: str, episodes: Sequence[Episode]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ep in episodes:
            fh.write(json.dumps({"type": "header", **ep.header},
                                separators=(",", ":")) + "\n")
            for s in ep.record.samples:
                fh.write(json.dumps(_sample_to_dict(s), separators=(",", ":")) + "\n")


def read_episodes(path: str) -> list[Episode]:
    episodes: list[Episode] = []
    header: Optional[dict] = None
    samples: list[TrajectorySample] = []

    def flush():
        if header is not None:
            episodes.append(Episode(header=header, record=TrajectoryRecord(samples)))

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                kind = obj.get("type")
                if kind == "header":
                    flush()
                    header = {k: v for k, v in obj.items() if k != "type"}
                    samples = []
                elif kind == "sample":
                    if header is None:
                        raise RecordError("sample before any header")
                    samples.append(_sample_from_dict(obj))
                else:
                    raise RecordError(f"unknown record line type: {kind!r}")
            except (KeyError, ValueError, TypeError) as exc:
                raise RecordError(f"{path}:{lineno}: bad record line: {exc}") from exc
    flush()
    return episodes


def session_for_episode(ep: Episode) -> Session:
    """Rebuild the session exactly as it was when the recording started."""
    config = SessionConfig.from_dict(ep.header["config"])
    session = Session(config)
    session.object_index = int(ep.header["object_index"])
    session.visible = bool(ep.header["visible"])
    robot = ep.header["robot"]
    session.robot = RobotState(
        ee_pos=vec3_from_seq(robot["ee_pos"], "ee_pos"),
        ee_facing=vec3_from_seq(robot["ee_facing"], "ee_facing"),
        speed=float(robot["speed"]))
    session.t_ms = int(ep.header["t_ms"])
    return session


def replay_episode(ep: Episode) -> list[RobotUpdate]:
    """Re-simulate an episode from its recorded hand inputs."""
    session = session_for_episode(ep)
    updates = []
    for s in ep.record.samples:
        hand = HandUpdate(t_ms=s.t_ms, pos=s.hand_v, d_v=s.d_v,
                          buttons=Buttons(draw=s.drawing))
        updates.append(session.tick(hand))
    return updates


def verify_replay(path: str) -> tuple[bool, str]:
    """Replay every episode in a recording and demand bit-identical outputs."""
    episodes = read_episodes(path)
    if not episodes:
        return True, "empty recording"
    for ei, ep in enumerate(episodes):
        updates = replay_episode(ep)
        for s, u in zip(ep.record.samples, updates):
            if (u.t_ms != s.t_ms or u.ee_pos != s.ee_pos or u.d_r != s.d_r
                    or u.phase != s.phase):
                return False, (f"episode {ei} diverges at t_ms={s.t_ms}: "
                               f"recorded ee={s.ee_pos} d_r={s.d_r} {s.phase.value}, "
                               f"replayed ee={u.ee_pos} d_r={u.d_r} {u.phase.value}")
    return True, f"{len(episodes)} episode(s) bit-identical"
