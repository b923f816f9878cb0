"""Deterministic scripted hand sources standing in for a human operator.

Three trajectory families:

  * approach: straight run along a surface point's outward normal, closing
    the virtual distance at constant speed, then holding at contact.
  * orbit_slide: closed loop over the object surface at a configurable
    standoff, draw button held.
  * poke_grid: visits n sampled surface points; each poke transfers from
    the previous retract point, approaches along the local normal, dwells
    at contact, and retracts, with no teleports in between.

Positions are in the tracked (VR) frame; the reported d_v is computed with
the same nearest-point math the server uses.
"""

from __future__ import annotations

import functools
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional, Union

from .geometry import (PLANE_PATCH, Cube, Plane, Shape, Sphere, Vec3,
                       nearest_point, sample_surface)
from .protocol import Buttons, HandUpdate


@dataclass(frozen=True)
class ApproachSpec:
    shape: Shape
    contact_point: Vec3
    start_distance: float = 0.4
    speed: float = 0.2
    hold_ms: int = 300


@dataclass(frozen=True)
class OrbitSlideSpec:
    shape: Shape
    angular_rate: float = 0.5
    standoff: float = 0.0
    turns: float = 1.0
    path_radius: float = 0.2  # planar orbits only; must fit the plane patch


@dataclass(frozen=True)
class PokeGridSpec:
    shape: Shape
    n_points: int = 24
    start_distance: float = 0.1
    speed: float = 0.25
    dwell_ms: int = 200
    transfer_speed: float = 0.5
    lead_in_ms: int = 1500  # hold before the first poke so the robot catches up
    seed: int = 0


TrajectorySpec = Union[ApproachSpec, OrbitSlideSpec, PokeGridSpec]


def _surface_normal(shape: Shape, point_on_surface: Vec3) -> Vec3:
    return nearest_point(shape, point_on_surface).normal


def _orbit_pos(spec: OrbitSlideSpec, theta: float) -> Vec3:
    shape = spec.shape
    if isinstance(shape, Sphere):
        r = shape.radius + spec.standoff
        return shape.center + Vec3(r * math.cos(theta), r * math.sin(theta), 0.0)
    if isinstance(shape, Plane):
        if spec.path_radius > PLANE_PATCH / 2.0:
            raise ValueError("orbit radius exceeds the plane patch")
        n = shape.normal
        ref = Vec3(0.0, 0.0, 1.0) if abs(n.z) < 0.9 else Vec3(1.0, 0.0, 0.0)
        u = n.cross(ref).normalized()
        v = n.cross(u)
        return (shape.point + u * (spec.path_radius * math.cos(theta))
                + v * (spec.path_radius * math.sin(theta)) + n * spec.standoff)
    if isinstance(shape, Cube):
        # Trace the square cross-section at center height, offset along the
        # local face normal so the standoff is the exact surface distance.
        c, s = math.cos(theta), math.sin(theta)
        t = shape.half_extent / max(abs(c), abs(s))
        bx, by = t * c, t * s
        if abs(c) >= abs(s):
            nx, ny = math.copysign(1.0, c), 0.0
        else:
            nx, ny = 0.0, math.copysign(1.0, s)
        local = Vec3(bx + spec.standoff * nx, by + spec.standoff * ny, 0.0)
        cy, sy = math.cos(shape.yaw), math.sin(shape.yaw)
        return shape.center + Vec3(cy * local.x - sy * local.y,
                                   sy * local.x + cy * local.y, 0.0)
    raise TypeError(f"not a shape: {shape!r}")


@dataclass(frozen=True)
class _Segment:
    t0_ms: int
    t1_ms: int
    p0: Vec3
    p1: Vec3
    contact_index: Optional[int] = None  # set on dwell segments

    def pos(self, t_ms: int) -> Vec3:
        span = self.t1_ms - self.t0_ms
        if span <= 0:
            return self.p1
        a = min(max((t_ms - self.t0_ms) / span, 0.0), 1.0)
        return self.p0 + (self.p1 - self.p0) * a


@functools.lru_cache(maxsize=64)
def _poke_schedule(spec: PokeGridSpec) -> tuple[_Segment, ...]:
    points = sample_surface(spec.shape, spec.n_points, spec.seed)
    segments: list[_Segment] = []
    t = 0
    prev_end: Optional[Vec3] = None
    for i, pt in enumerate(points):
        n = _surface_normal(spec.shape, pt)
        start = pt + n * spec.start_distance
        if i == 0 and spec.lead_in_ms > 0:
            segments.append(_Segment(t, t + spec.lead_in_ms, start, start))
            t += spec.lead_in_ms
        if prev_end is not None:
            hop = (start - prev_end).norm()
            transfer_ms = int(math.ceil(hop / spec.transfer_speed * 1000.0))
            if transfer_ms > 0:
                segments.append(_Segment(t, t + transfer_ms, prev_end, start))
                t += transfer_ms
        leg_ms = int(math.ceil(spec.start_distance / spec.speed * 1000.0))
        segments.append(_Segment(t, t + leg_ms, start, pt))
        t += leg_ms
        segments.append(_Segment(t, t + spec.dwell_ms, pt, pt, contact_index=i))
        t += spec.dwell_ms
        segments.append(_Segment(t, t + leg_ms, pt, start))
        t += leg_ms
        prev_end = start
    return tuple(segments)


def spec_duration_ms(spec: TrajectorySpec) -> int:
    if isinstance(spec, ApproachSpec):
        return int(math.ceil(spec.start_distance / spec.speed * 1000.0)) + spec.hold_ms
    if isinstance(spec, OrbitSlideSpec):
        return int(math.ceil(spec.turns * 2.0 * math.pi / spec.angular_rate * 1000.0))
    if isinstance(spec, PokeGridSpec):
        schedule = _poke_schedule(spec)
        return schedule[-1].t1_ms
    raise TypeError(f"not a trajectory spec: {spec!r}")


def poke_index(spec: PokeGridSpec, t_ms: int) -> Optional[int]:
    """Index of the poke whose dwell covers t_ms, if any."""
    schedule = _poke_schedule(spec)
    starts = [seg.t0_ms for seg in schedule]
    i = bisect_right(starts, t_ms) - 1
    if 0 <= i < len(schedule) and schedule[i].t1_ms > t_ms:
        return schedule[i].contact_index
    return None


def scripted_hand(spec: TrajectorySpec, t_ms: int) -> HandUpdate:
    """Hand pose at time t_ms; times past the spec duration hold the terminal pose."""
    if isinstance(spec, ApproachSpec):
        n = _surface_normal(spec.shape, spec.contact_point)
        remaining = max(spec.start_distance - spec.speed * (t_ms / 1000.0), 0.0)
        pos = spec.contact_point + n * remaining
        buttons = Buttons()
    elif isinstance(spec, OrbitSlideSpec):
        t = min(t_ms, spec_duration_ms(spec))
        theta = spec.angular_rate * (t / 1000.0)
        pos = _orbit_pos(spec, theta)
        buttons = Buttons(draw=True)
    elif isinstance(spec, PokeGridSpec):
        schedule = _poke_schedule(spec)
        t = min(max(t_ms, 0), schedule[-1].t1_ms)
        starts = [seg.t0_ms for seg in schedule]
        i = min(max(bisect_right(starts, t) - 1, 0), len(schedule) - 1)
        pos = schedule[i].pos(t)
        buttons = Buttons()
    else:
        raise TypeError(f"not a trajectory spec: {spec!r}")
    d_v = nearest_point(spec.shape, pos).distance
    return HandUpdate(t_ms=t_ms, pos=pos, d_v=d_v, buttons=buttons)
