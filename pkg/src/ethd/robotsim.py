"""Kinematic stand-in for the collaborative robot's end-effector.

First-order point mass with a trapezoidal speed ramp: per tick the speed
may rise by at most a_max*dt up to v_max, the end-effector moves straight
toward the target by at most speed*dt, and the result is clamped to the
spherical workspace. Deterministic: same state, target sequence, and dt
give bit-identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .control import PlacementTarget
from .geometry import Vec3

# Facing reorientation rate limit, rad/s.
FACING_RATE = 2.0 * math.pi


@dataclass(frozen=True)
class RobotLimits:
    v_max: float = 1.0
    a_max: float = 5.0
    reach: float = 0.9
    workspace_origin: Vec3 = field(default_factory=lambda: Vec3(0.0, 0.0, 0.0))

    def __post_init__(self) -> None:
        if not (self.v_max > 0.0 and self.a_max > 0.0 and self.reach > 0.0):
            raise ValueError("robot limits must be strictly positive")


@dataclass(frozen=True)
class RobotState:
    """Immutable end-effector snapshot; safe to share across contexts."""

    ee_pos: Vec3
    ee_facing: Vec3
    speed: float = 0.0
    clamped: bool = False
    in_contact: bool = False


def clamp_workspace(p: Vec3, limits: RobotLimits) -> tuple[Vec3, bool]:
    """Project onto the reach sphere when outside; flags whether clamping occurred."""
    offset = p - limits.workspace_origin
    dist = offset.norm()
    if dist <= limits.reach:
        return p, False
    return limits.workspace_origin + offset * (limits.reach / dist), True


def detect_contact(ee_pos: Vec3, hand_r: Vec3, eps: float) -> bool:
    if eps <= 0.0:
        raise ValueError(f"eps must be > 0, got {eps!r}")
    return (ee_pos - hand_r).norm() <= eps


def _turn_toward(current: Vec3, target: Vec3, max_angle: float) -> Vec3:
    cos_a = min(1.0, max(-1.0, current.dot(target)))
    angle = math.acos(cos_a)
    if angle <= max_angle:
        return target
    pivot = current.cross(target)
    if pivot.norm() < 1e-12:
        # Antiparallel: rotate through a deterministic perpendicular.
        ref = Vec3(1.0, 0.0, 0.0) if abs(current.x) < 0.9 else Vec3(0.0, 0.0, 1.0)
        perp = current.cross(ref).normalized()
        turned = current * math.cos(max_angle) + perp * math.sin(max_angle)
        return turned.normalized()
    sin_a = math.sin(angle)
    w0 = math.sin(angle - max_angle) / sin_a
    w1 = math.sin(max_angle) / sin_a
    return (current * w0 + target * w1).normalized()


def step(state: RobotState, target: PlacementTarget, limits: RobotLimits, dt: float) -> RobotState:
    """Advance one tick toward the target.

    The contact flag is owned by the caller (it needs the hand position) and
    passes through unchanged.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt!r}")

    gap_vec = target.position - state.ee_pos
    gap = gap_vec.norm()
    v_allow = min(state.speed + limits.a_max * dt, limits.v_max)
    move = min(gap, v_allow * dt)
    if gap > 0.0:
        raw = state.ee_pos + gap_vec * (move / gap)
    else:
        raw = state.ee_pos
    pos, clamped = clamp_workspace(raw, limits)
    # Realized speed, not commanded: decays to zero once the target is reached
    # and stays honest when clamping shortens the actual travel.
    speed = (pos - state.ee_pos).norm() / dt
    facing = _turn_toward(state.ee_facing, target.facing, FACING_RATE * dt)
    return replace(state, ee_pos=pos, ee_facing=facing, speed=speed, clamped=clamped)
