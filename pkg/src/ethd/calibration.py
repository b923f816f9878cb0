"""Rigid registration of the tracked (VR) frame onto the robot frame.

Solves the orthogonal Procrustes problem on paired point clouds: stack the
centered clouds as 3xN matrices A (tracked) and B (robot), take the SVD of
M = B A^T and form R = U V^T, flipping the last column of U first when
det(U V^T) < 0 so the result is a proper rotation (Kabsch correction).
The translation is t = centroid(B) - R centroid(A).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .geometry import Vec3, vec3_from_seq

_ORTHO_TOL = 1e-9
# Relative floor on the second singular value of the cross-covariance below
# which the rotation about the dominant axis is unobservable.
_RANK_TOL = 1e-9


class CalibrationError(Exception):
    """Base for calibration failures."""


class TooFewSamplesError(CalibrationError):
    pass


class DegenerateConfigurationError(CalibrationError):
    pass


@dataclass(frozen=True)
class CalibrationSample:
    """Simultaneous point pair: `a` in the tracked frame, `b` in the robot frame."""

    a: Vec3
    b: Vec3

    def __post_init__(self) -> None:
        if not (self.a.is_finite() and self.b.is_finite()):
            raise ValueError("calibration sample components must be finite")


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """Proper rigid transform p -> r @ p + t mapping frame a into frame b."""

    r: np.ndarray
    t: Vec3 = field(default_factory=lambda: Vec3(0.0, 0.0, 0.0))

    def __post_init__(self) -> None:
        r = np.asarray(self.r, dtype=float)
        if r.shape != (3, 3):
            raise ValueError(f"rotation must be 3x3, got shape {r.shape}")
        if not np.all(np.isfinite(r)) or not self.t.is_finite():
            raise ValueError("transform must be finite")
        if np.max(np.abs(r.T @ r - np.eye(3))) > _ORTHO_TOL:
            raise ValueError("rotation matrix is not orthonormal")
        if abs(np.linalg.det(r) - 1.0) > _ORTHO_TOL:
            raise ValueError("rotation matrix must have det +1 (no reflections)")
        r = r.copy()
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), Vec3(0.0, 0.0, 0.0))

    def to_dict(self) -> dict:
        return {"r": self.r.tolist(), "t": list(self.t)}

    @staticmethod
    def from_dict(data: dict) -> "RigidTransform":
        r = np.asarray(data["r"], dtype=float)
        return RigidTransform(r, vec3_from_seq(data["t"], "translation"))

    def almost_equal(self, other: "RigidTransform", tol: float = 1e-9) -> bool:
        return (np.max(np.abs(self.r - other.r)) <= tol
                and max(abs(c) for c in (self.t - other.t)) <= tol)


def center(points: Sequence[Vec3]) -> tuple[list[Vec3], Vec3]:
    """Subtract the centroid; returns (centered points, centroid)."""
    if len(points) == 0:
        raise TooFewSamplesError("cannot center an empty point list")
    arr = np.array(points, dtype=float)
    centroid = arr.mean(axis=0)
    centered = arr - centroid
    return [Vec3(*row) for row in centered], Vec3(*centroid)


def estimate_rotation(centered_a: Sequence[Vec3], centered_b: Sequence[Vec3]) -> np.ndarray:
    """Best proper rotation R minimizing sum |R a_i - b_i|^2 over centered clouds."""
    if len(centered_a) != len(centered_b):
        raise ValueError(
            f"point counts differ: {len(centered_a)} vs {len(centered_b)}")
    if len(centered_a) < 3:
        raise TooFewSamplesError(
            f"need at least 3 point pairs, got {len(centered_a)}")
    a = np.array(centered_a, dtype=float).T  # 3xN
    b = np.array(centered_b, dtype=float).T
    m = b @ a.T
    u, s, vt = np.linalg.svd(m)
    if s[0] <= 0.0 or s[1] <= _RANK_TOL * s[0]:
        raise DegenerateConfigurationError(
            "point configuration is (near-)collinear; rotation is not recoverable")
    if np.linalg.det(u @ vt) < 0.0:
        u = u.copy()
        u[:, -1] = -u[:, -1]
    return u @ vt


def estimate_transform(samples: Sequence[CalibrationSample]) -> RigidTransform:
    """Fit the rigid transform mapping sample.a points onto sample.b points."""
    if len(samples) < 3:
        raise TooFewSamplesError(f"need at least 3 samples, got {len(samples)}")
    centered_a, centroid_a = center([s.a for s in samples])
    centered_b, centroid_b = center([s.b for s in samples])
    r = estimate_rotation(centered_a, centered_b)
    t = np.asarray(centroid_b) - r @ np.asarray(centroid_a)
    return RigidTransform(r, Vec3(*t))


def apply_transform(tf: RigidTransform, p: Vec3) -> Vec3:
    q = tf.r @ np.asarray(p, dtype=float)
    return Vec3(q[0] + tf.t.x, q[1] + tf.t.y, q[2] + tf.t.z)


def alignment_rmse(tf: RigidTransform, samples: Sequence[CalibrationSample]) -> float:
    """Root-mean-square residual |R a_i + t - b_i| in meters."""
    if len(samples) == 0:
        raise TooFewSamplesError("cannot compute a residual over zero samples")
    a = np.array([s.a for s in samples], dtype=float)
    b = np.array([s.b for s in samples], dtype=float)
    residuals = a @ tf.r.T + np.asarray(tf.t) - b
    return float(math.sqrt(np.mean(np.sum(residuals * residuals, axis=1))))


def rotation_angle_between(r1: np.ndarray, r2: np.ndarray) -> float:
    """Geodesic angle in radians between two rotation matrices."""
    cos = (np.trace(r1.T @ r2) - 1.0) / 2.0
    return float(math.acos(min(1.0, max(-1.0, cos))))


# File formats: pair files are NDJSON with one {"a":[x,y,z],"b":[x,y,z]}
# object per line; results are a single JSON document
# {"r":[[...],[...],[...]],"t":[x,y,z],"rmse":m,"n":count}.

def read_pairs(path: str) -> list[CalibrationSample]:
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                samples.append(CalibrationSample(
                    vec3_from_seq(obj["a"], "a"), vec3_from_seq(obj["b"], "b")))
            except (ValueError, KeyError, TypeError) as exc:
                raise CalibrationError(f"{path}:{lineno}: bad pair line: {exc}") from exc
    return samples


def write_pairs(path: str, samples: Iterable[CalibrationSample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps({"a": list(s.a), "b": list(s.b)}) + "\n")


def write_result(path: str, tf: RigidTransform, rmse: float, n: int) -> None:
    doc = {"r": tf.r.tolist(), "t": list(tf.t), "rmse": rmse, "n": n}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, indent=2) + "\n")


def read_result(path: str) -> tuple[RigidTransform, float, int]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return RigidTransform.from_dict(doc), float(doc["rmse"]), int(doc["n"])
