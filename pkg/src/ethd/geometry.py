"""Shape primitives and point-to-surface queries.

All lengths are meters, all angles radians. The vertical axis is +z and a
cube's yaw rotates it about +z. Distance queries treat the plane as
infinite; surface sampling (and the UI) bound it to a square patch of
``PLANE_PATCH`` meters per side centered on its anchor point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

# Side length of the bounded plane patch used for sampling and rendering.
PLANE_PATCH = 0.6

_UNIT_TOL = 1e-9


class Vec3(NamedTuple):
    """Cartesian point or direction, meters."""

    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":  # type: ignore[override]
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def __mul__(self, s: float) -> "Vec3":  # type: ignore[override]
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)


def vec3_from_seq(seq: Sequence[float], what: str = "vector") -> Vec3:
    """Build a Vec3 from a length-3 sequence, rejecting wrong arity and non-finite values."""
    if not isinstance(seq, (list, tuple)) or len(seq) != 3:
        raise ValueError(f"{what} must have exactly 3 components, got {seq!r}")
    v = Vec3(float(seq[0]), float(seq[1]), float(seq[2]))
    if not v.is_finite():
        raise ValueError(f"{what} has non-finite components: {seq!r}")
    return v


def _require_unit(v: Vec3, what: str) -> Vec3:
    n = v.norm()
    if abs(n - 1.0) > _UNIT_TOL:
        raise ValueError(f"{what} must be unit length (|v| = {n!r})")
    # Renormalize so downstream math sees an exact unit vector.
    return Vec3(v.x / n, v.y / n, v.z / n)


class ShapeKind(str, Enum):
    PLANE = "plane"
    SPHERE = "sphere"
    CUBE = "cube"


@dataclass(frozen=True)
class Plane:
    """Infinite plane through `point` with outward unit `normal`."""

    point: Vec3
    normal: Vec3

    def __post_init__(self) -> None:
        if not self.point.is_finite():
            raise ValueError("plane point must be finite")
        object.__setattr__(self, "normal", _require_unit(self.normal, "plane normal"))


@dataclass(frozen=True)
class Sphere:
    center: Vec3
    radius: float

    def __post_init__(self) -> None:
        if not self.center.is_finite():
            raise ValueError("sphere center must be finite")
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"sphere radius must be > 0, got {self.radius!r}")


@dataclass(frozen=True)
class Cube:
    """Axis-aligned cube rotated by `yaw` about the vertical (+z) axis."""

    center: Vec3
    half_extent: float
    yaw: float = math.pi / 4

    def __post_init__(self) -> None:
        if not self.center.is_finite():
            raise ValueError("cube center must be finite")
        if not (self.half_extent > 0.0 and math.isfinite(self.half_extent)):
            raise ValueError(f"cube half_extent must be > 0, got {self.half_extent!r}")
        if not math.isfinite(self.yaw):
            raise ValueError("cube yaw must be finite")
        object.__setattr__(self, "yaw", self.yaw % (2.0 * math.pi))


Shape = Union[Plane, Sphere, Cube]


def shape_kind(shape: Shape) -> ShapeKind:
    if isinstance(shape, Plane):
        return ShapeKind.PLANE
    if isinstance(shape, Sphere):
        return ShapeKind.SPHERE
    if isinstance(shape, Cube):
        return ShapeKind.CUBE
    raise TypeError(f"not a shape: {shape!r}")


class SurfaceQuery(NamedTuple):
    """Result of a nearest-point query: closest surface point, outward unit
    normal there, and the unsigned distance from the query point."""

    nearest: Vec3
    normal: Vec3
    distance: float


def _rot_z(yaw: float, v: Vec3) -> Vec3:
    c, s = math.cos(yaw), math.sin(yaw)
    return Vec3(c * v.x - s * v.y, s * v.x + c * v.y, v.z)


def nearest_point(shape: Shape, p: Vec3) -> SurfaceQuery:
    """Euclidean-nearest surface point, its outward normal, and the distance.

    Interior points still get a surface point and the (positive) distance to
    it; use signed_distance for penetration sign.
    """
    if isinstance(shape, Plane):
        d = (p - shape.point).dot(shape.normal)
        nearest = p - shape.normal * d
        return SurfaceQuery(nearest, shape.normal, abs(d))

    if isinstance(shape, Sphere):
        v = p - shape.center
        r = v.norm()
        if r == 0.0:
            # Center query: any direction works, pick +z deterministically.
            n = Vec3(0.0, 0.0, 1.0)
            return SurfaceQuery(shape.center + n * shape.radius, n, shape.radius)
        n = v * (1.0 / r)
        return SurfaceQuery(shape.center + n * shape.radius, n, abs(r - shape.radius))

    if isinstance(shape, Cube):
        h = shape.half_extent
        q = _rot_z(-shape.yaw, p - shape.center)
        coords = [q.x, q.y, q.z]
        outside = [i for i in range(3) if abs(coords[i]) > h]
        if outside:
            near = [min(max(c, -h), h) for c in coords]
            delta = [coords[i] - near[i] for i in range(3)]
            dist = math.sqrt(sum(d * d for d in delta))
            n_local = [0.0, 0.0, 0.0]
            for i in outside:
                n_local[i] = math.copysign(1.0, coords[i])
        else:
            # Interior or on the surface: snap to the closest face(s).
            gaps = [h - abs(c) for c in coords]
            g = min(gaps)
            at_bound = [i for i in range(3) if gaps[i] == g] if g == 0.0 else [gaps.index(g)]
            k = at_bound[0]
            near = list(coords)
            near[k] = math.copysign(h, coords[k]) if coords[k] != 0.0 else h
            dist = g
            # On an edge or corner the normal blends the touching faces.
            n_local = [0.0, 0.0, 0.0]
            for i in at_bound:
                n_local[i] = math.copysign(1.0, coords[i]) if coords[i] != 0.0 else 1.0
        n_len = math.sqrt(sum(c * c for c in n_local))
        n_local = [c / n_len for c in n_local]
        nearest = shape.center + _rot_z(shape.yaw, Vec3(*near))
        normal = _rot_z(shape.yaw, Vec3(*n_local))
        return SurfaceQuery(nearest, normal, dist)

    raise TypeError(f"not a shape: {shape!r}")


def signed_distance(shape: Shape, p: Vec3) -> float:
    """Signed distance to the surface: negative inside a closed shape, and the
    plane signs by its normal's half-space."""
    if isinstance(shape, Plane):
        return (p - shape.point).dot(shape.normal)

    if isinstance(shape, Sphere):
        return (p - shape.center).norm() - shape.radius

    if isinstance(shape, Cube):
        h = shape.half_extent
        q = _rot_z(-shape.yaw, p - shape.center)
        qs = [abs(q.x) - h, abs(q.y) - h, abs(q.z) - h]
        outside = math.sqrt(sum(max(c, 0.0) ** 2 for c in qs))
        inside = min(max(qs), 0.0)
        return outside + inside

    raise TypeError(f"not a shape: {shape!r}")


def front_projected_distance(shape: Shape, p: Vec3, direction: Vec3) -> Optional[float]:
    """Distance along the ray p + s*direction (s >= 0) to the first surface hit,
    or None when the ray misses."""
    d = _require_unit(direction, "ray direction")

    if isinstance(shape, Plane):
        denom = shape.normal.dot(d)
        num = shape.normal.dot(shape.point - p)
        if abs(denom) < 1e-15:
            return 0.0 if abs(num) < 1e-15 else None
        s = num / denom
        return s if s >= 0.0 else None

    if isinstance(shape, Sphere):
        o = p - shape.center
        b = o.dot(d)
        c = o.dot(o) - shape.radius * shape.radius
        disc = b * b - c
        if disc < 0.0:
            return None
        root = math.sqrt(disc)
        s_in, s_out = -b - root, -b + root
        if s_in >= 0.0:
            return s_in
        if s_out >= 0.0:
            return s_out
        return None

    if isinstance(shape, Cube):
        h = shape.half_extent
        o = _rot_z(-shape.yaw, p - shape.center)
        v = _rot_z(-shape.yaw, d)
        t_lo, t_hi = -math.inf, math.inf
        for oc, vc in ((o.x, v.x), (o.y, v.y), (o.z, v.z)):
            if vc == 0.0:
                if not (-h <= oc <= h):
                    return None
                continue
            t1, t2 = (-h - oc) / vc, (h - oc) / vc
            if t1 > t2:
                t1, t2 = t2, t1
            t_lo = max(t_lo, t1)
            t_hi = min(t_hi, t2)
        if t_hi < t_lo or t_hi < 0.0:
            return None
        return t_lo if t_lo >= 0.0 else t_hi

    raise TypeError(f"not a shape: {shape!r}")


def _plane_basis(normal: Vec3) -> tuple[Vec3, Vec3]:
    ref = Vec3(0.0, 0.0, 1.0) if abs(normal.z) < 0.9 else Vec3(1.0, 0.0, 0.0)
    u = normal.cross(ref).normalized()
    v = normal.cross(u)
    return u, v


def sample_surface(shape: Shape, n: int, seed: int) -> list[Vec3]:
    """Deterministic, approximately area-uniform surface samples.

    The plane is sampled on its bounded PLANE_PATCH square.
    """
    if n < 1:
        raise ValueError(f"need n >= 1 samples, got {n}")
    rng = np.random.default_rng(seed)

    if isinstance(shape, Plane):
        u, v = _plane_basis(shape.normal)
        half = PLANE_PATCH / 2.0
        st = rng.uniform(-half, half, size=(n, 2))
        return [shape.point + u * float(a) + v * float(b) for a, b in st]

    if isinstance(shape, Sphere):
        out: list[Vec3] = []
        while len(out) < n:
            g = rng.standard_normal((n - len(out), 3))
            norms = np.linalg.norm(g, axis=1)
            for row, m in zip(g, norms):
                if m > 0.0:
                    d = Vec3(float(row[0]) / m, float(row[1]) / m, float(row[2]) / m)
                    out.append(shape.center + d * shape.radius)
        return out

    if isinstance(shape, Cube):
        h = shape.half_extent
        faces = rng.integers(0, 6, size=n)
        uv = rng.uniform(-h, h, size=(n, 2))
        out = []
        for f, (a, b) in zip(faces, uv):
            axis, sign = int(f) // 2, 1.0 if f % 2 == 0 else -1.0
            local = [0.0, 0.0, 0.0]
            local[axis] = sign * h
            local[(axis + 1) % 3] = float(a)
            local[(axis + 2) % 3] = float(b)
            out.append(shape.center + _rot_z(shape.yaw, Vec3(*local)))
        return out

    raise TypeError(f"not a shape: {shape!r}")


def shape_to_dict(shape: Shape) -> dict:
    if isinstance(shape, Plane):
        return {"kind": "plane", "point": list(shape.point), "normal": list(shape.normal)}
    if isinstance(shape, Sphere):
        return {"kind": "sphere", "center": list(shape.center), "radius": shape.radius}
    if isinstance(shape, Cube):
        return {
            "kind": "cube",
            "center": list(shape.center),
            "half_extent": shape.half_extent,
            "yaw": shape.yaw,
        }
    raise TypeError(f"not a shape: {shape!r}")


def shape_from_dict(data: dict) -> Shape:
    if not isinstance(data, dict):
        raise ValueError(f"shape must be a JSON object, got {data!r}")
    kind = data.get("kind")
    if kind == "plane":
        return Plane(vec3_from_seq(data["point"], "plane point"),
                     vec3_from_seq(data["normal"], "plane normal"))
    if kind == "sphere":
        return Sphere(vec3_from_seq(data["center"], "sphere center"), float(data["radius"]))
    if kind == "cube":
        return Cube(vec3_from_seq(data["center"], "cube center"),
                    float(data["half_extent"]), float(data["yaw"]))
    raise ValueError(f"unknown shape kind: {kind!r}")


def shape_to_json(shape: Shape) -> str:
    return json.dumps(shape_to_dict(shape), separators=(",", ":"))


def shape_from_json(text: str) -> Shape:
    return shape_from_dict(json.loads(text))
