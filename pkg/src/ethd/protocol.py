"""Wire schema and framing for the client/server loop.

Messages are newline-delimited JSON, one object per line, each carrying a
"type" discriminator. Lengths are meters, times integer milliseconds.

    {"type":"hand","t_ms":0,"pos":[0.0,0.0,0.0],"d_v":0.1,
     "buttons":{"switch":false,"hide":false,"draw":false}}
    {"type":"robot","t_ms":10,"ee_pos":[...],"d_r":0.2,"phase":"free","clamped":false}
    {"type":"object","shape":{"kind":"sphere","center":[...],"radius":0.15},"visible":true}
    {"type":"calib_pair","a":[...],"b":[...]}
    {"type":"calib_result","r":[[...],[...],[...]],"t":[...],"rmse":0.004,"n":486}
    {"type":"hello","version":1,"role":"hand","distance_authority":false}
    {"type":"error","code":"busy","detail":"..."}

Unknown extra fields are ignored on decode; unknown types are rejected.
The first message on any connection must be a hello.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

from .calibration import RigidTransform
from .control import ContactPhase
from .geometry import Shape, Vec3, shape_from_dict, shape_to_dict

WIRE_VERSION = 1
DEFAULT_TCP_PORT = 9750
DEFAULT_WS_PORT = 9751
MAX_LINE_BYTES = 1 << 20


class ProtocolError(Exception):
    """Decode/encode failure with a wire-safe error code."""

    def __init__(self, code: str, detail: str):
        super().__init__(detail)
        self.code = code
        self.detail = detail


@dataclass(frozen=True)
class Buttons:
    switch: bool = False
    hide: bool = False
    draw: bool = False


@dataclass(frozen=True)
class HandUpdate:
    t_ms: int
    pos: Vec3
    d_v: float
    buttons: Buttons = Buttons()


@dataclass(frozen=True)
class RobotUpdate:
    t_ms: int
    ee_pos: Vec3
    d_r: float
    phase: ContactPhase
    clamped: bool


@dataclass(frozen=True)
class ObjectState:
    shape: Shape
    visible: bool


@dataclass(frozen=True)
class CalibPair:
    a: Vec3
    b: Vec3


@dataclass(frozen=True)
class CalibResult:
    r: tuple[tuple[float, float, float], ...]
    t: Vec3
    rmse: float
    n: int

    @staticmethod
    def from_transform(tf: RigidTransform, rmse: float, n: int) -> "CalibResult":
        rows = tuple(tuple(float(x) for x in row) for row in tf.r)
        return CalibResult(r=rows, t=tf.t, rmse=rmse, n=n)

    def to_transform(self) -> RigidTransform:
        return RigidTransform([list(row) for row in self.r], self.t)


@dataclass(frozen=True)
class Hello:
    version: int = WIRE_VERSION
    role: str = "hand"
    distance_authority: bool = False


@dataclass(frozen=True)
class ErrorMsg:
    code: str
    detail: str = ""


WireMessage = Union[HandUpdate, RobotUpdate, ObjectState, CalibPair,
                    CalibResult, Hello, ErrorMsg]

_ROLES = ("hand", "observer")


def _f(value: float) -> float:
    out = float(value) + 0.0  # canonicalize -0.0
    if not math.isfinite(out):
        raise ProtocolError("non_finite", f"non-finite number: {value!r}")
    return out


def _vec_out(v: Vec3) -> list[float]:
    return [_f(v.x), _f(v.y), _f(v.z)]


def encode(msg: WireMessage) -> bytes:
    """One line of JSON, newline terminated. Rejects non-finite numerics."""
    if isinstance(msg, HandUpdate):
        payload = {
            "type": "hand", "t_ms": int(msg.t_ms), "pos": _vec_out(msg.pos),
            "d_v": _f(msg.d_v),
            "buttons": {"switch": bool(msg.buttons.switch),
                        "hide": bool(msg.buttons.hide),
                        "draw": bool(msg.buttons.draw)},
        }
    elif isinstance(msg, RobotUpdate):
        payload = {
            "type": "robot", "t_ms": int(msg.t_ms), "ee_pos": _vec_out(msg.ee_pos),
            "d_r": _f(msg.d_r), "phase": msg.phase.value, "clamped": bool(msg.clamped),
        }
    elif isinstance(msg, ObjectState):
        payload = {"type": "object", "shape": shape_to_dict(msg.shape),
                   "visible": bool(msg.visible)}
    elif isinstance(msg, CalibPair):
        payload = {"type": "calib_pair", "a": _vec_out(msg.a), "b": _vec_out(msg.b)}
    elif isinstance(msg, CalibResult):
        payload = {"type": "calib_result",
                   "r": [[_f(x) for x in row] for row in msg.r],
                   "t": _vec_out(msg.t), "rmse": _f(msg.rmse), "n": int(msg.n)}
    elif isinstance(msg, Hello):
        payload = {"type": "hello", "version": int(msg.version), "role": msg.role,
                   "distance_authority": bool(msg.distance_authority)}
    elif isinstance(msg, ErrorMsg):
        payload = {"type": "error", "code": msg.code, "detail": msg.detail}
    else:
        raise ProtocolError("bad_message", f"not a wire message: {msg!r}")
    try:
        text = json.dumps(payload, separators=(",", ":"), allow_nan=False)
    except ValueError as exc:
        raise ProtocolError("non_finite", str(exc)) from exc
    return text.encode("utf-8") + b"\n"


def _reject_constant(name: str):
    raise ProtocolError("non_finite", f"non-finite JSON constant: {name}")


def _require(obj: dict, name: str):
    if name not in obj:
        raise ProtocolError("missing_field", f"missing required field: {name}")
    return obj[name]


def _int_field(obj: dict, name: str) -> int:
    v = _require(obj, name)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ProtocolError("bad_value", f"field {name} must be an integer, got {v!r}")
    return v


def _real_field(obj: dict, name: str) -> float:
    v = _require(obj, name)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ProtocolError("bad_value", f"field {name} must be a number, got {v!r}")
    return _f(v)


def _bool_field(obj: dict, name: str, default=None) -> bool:
    if default is not None and name not in obj:
        return default
    v = _require(obj, name)
    if not isinstance(v, bool):
        raise ProtocolError("bad_value", f"field {name} must be a boolean, got {v!r}")
    return v


def _vec_field(obj: dict, name: str) -> Vec3:
    v = _require(obj, name)
    if not isinstance(v, list) or len(v) != 3:
        raise ProtocolError("bad_arity", f"field {name} must be a 3-vector, got {v!r}")
    out = []
    for c in v:
        if isinstance(c, bool) or not isinstance(c, (int, float)):
            raise ProtocolError("bad_value", f"field {name} has a non-numeric component")
        out.append(_f(c))
    return Vec3(*out)


def decode(line: Union[bytes, str]) -> WireMessage:
    """Parse one framed line into a message; raises ProtocolError on anything off."""
    if isinstance(line, bytes):
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProtocolError("bad_json", f"not utf-8: {exc}") from exc
    else:
        text = line
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ProtocolError("bad_json", f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("bad_json", f"message must be a JSON object, got {obj!r}")
    kind = obj.get("type")

    if kind == "hand":
        raw_buttons = _require(obj, "buttons")
        if not isinstance(raw_buttons, dict):
            raise ProtocolError("bad_value", "field buttons must be an object")
        buttons = Buttons(switch=_bool_field(raw_buttons, "switch", False),
                          hide=_bool_field(raw_buttons, "hide", False),
                          draw=_bool_field(raw_buttons, "draw", False))
        d_v = _real_field(obj, "d_v")
        if d_v < 0.0:
            raise ProtocolError("bad_value", f"d_v must be >= 0, got {d_v!r}")
        return HandUpdate(t_ms=_int_field(obj, "t_ms"), pos=_vec_field(obj, "pos"),
                          d_v=d_v, buttons=buttons)

    if kind == "robot":
        phase_raw = _require(obj, "phase")
        try:
            phase = ContactPhase(phase_raw)
        except ValueError as exc:
            raise ProtocolError("bad_value", f"unknown phase: {phase_raw!r}") from exc
        d_r = _real_field(obj, "d_r")
        if d_r < 0.0:
            raise ProtocolError("bad_value", f"d_r must be >= 0, got {d_r!r}")
        return RobotUpdate(t_ms=_int_field(obj, "t_ms"), ee_pos=_vec_field(obj, "ee_pos"),
                           d_r=d_r, phase=phase, clamped=_bool_field(obj, "clamped"))

    if kind == "object":
        try:
            shape = shape_from_dict(_require(obj, "shape"))
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError("bad_value", f"bad shape: {exc}") from exc
        return ObjectState(shape=shape, visible=_bool_field(obj, "visible"))

    if kind == "calib_pair":
        return CalibPair(a=_vec_field(obj, "a"), b=_vec_field(obj, "b"))

    if kind == "calib_result":
        raw_r = _require(obj, "r")
        if (not isinstance(raw_r, list) or len(raw_r) != 3
                or any(not isinstance(row, list) or len(row) != 3 for row in raw_r)):
            raise ProtocolError("bad_arity", "field r must be a 3x3 matrix")
        rows = tuple(tuple(_f(x) for x in row) for row in raw_r)
        return CalibResult(r=rows, t=_vec_field(obj, "t"),
                           rmse=_real_field(obj, "rmse"), n=_int_field(obj, "n"))

    if kind == "hello":
        role = _require(obj, "role")
        if role not in _ROLES:
            raise ProtocolError("bad_value", f"unknown role: {role!r}")
        return Hello(version=_int_field(obj, "version"), role=role,
                     distance_authority=_bool_field(obj, "distance_authority", False))

    if kind == "error":
        code = _require(obj, "code")
        if not isinstance(code, str):
            raise ProtocolError("bad_value", "error code must be a string")
        detail = obj.get("detail", "")
        if not isinstance(detail, str):
            raise ProtocolError("bad_value", "error detail must be a string")
        return ErrorMsg(code=code, detail=detail)

    raise ProtocolError("unknown_type", f"unknown message type: {kind!r}")


class LineBuffer:
    """Reassembles newline framing from arbitrary chunk boundaries."""

    def __init__(self, max_line: int = MAX_LINE_BYTES):
        self._buf = b""
        self._max = max_line

    def feed(self, data: bytes) -> list[bytes]:
        """Append a chunk; returns the complete lines it closed (sans newline)."""
        self._buf += data
        if len(self._buf) > self._max and b"\n" not in self._buf:
            self._buf = b""
            raise ProtocolError("line_too_long", f"line exceeds {self._max} bytes")
        lines = []
        while b"\n" in self._buf:
            line, self._buf = self._buf.split(b"\n", 1)
            lines.append(line)
        return lines
