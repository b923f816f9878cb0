"""Fit plane / sphere / cube models to contact point clouds and classify.

The sphere uses the standard algebraic least-squares fit; the plane comes
from an SVD of the centered cloud; the cube (yaw held fixed) is found by a
multiscale grid search over center and half extent. Classification picks
the model with the lowest RMS surface residual, breaking exact ties in the
order plane > sphere > cube.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .geometry import Cube, Plane, ShapeKind, Sphere, Vec3

MIN_CONTACTS = 12

# A "sphere" fit flatter than the desk workspace is a plane in disguise.
MAX_SPHERE_RADIUS = 0.75


def fit_plane(points: np.ndarray) -> tuple[Plane, float]:
    """Least-squares plane; returns (plane, rms residual)."""
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid, full_matrices=False)
    normal = vt[-1]
    residuals = (points - centroid) @ normal
    rms = float(math.sqrt(np.mean(residuals ** 2)))
    return Plane(point=Vec3(*centroid), normal=Vec3(*normal)), rms


def fit_sphere(points: np.ndarray) -> tuple[Sphere | None, float]:
    """Algebraic sphere fit; returns (sphere, rms residual) or (None, inf)
    when the cloud does not support a finite desk-scale sphere."""
    a = np.column_stack([2.0 * points, np.ones(len(points))])
    b = np.sum(points * points, axis=1)
    try:
        sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    except np.linalg.LinAlgError:
        return None, math.inf
    cx, cy, cz, m = sol
    r_sq = m + cx * cx + cy * cy + cz * cz
    if not (np.isfinite(r_sq) and r_sq > 0.0):
        return None, math.inf
    radius = math.sqrt(r_sq)
    if radius > MAX_SPHERE_RADIUS:
        return None, math.inf
    center = np.array([cx, cy, cz])
    residuals = np.linalg.norm(points - center, axis=1) - radius
    rms = float(math.sqrt(np.mean(residuals ** 2)))
    return Sphere(center=Vec3(cx, cy, cz), radius=radius), rms


def _box_rms(local: np.ndarray, center: np.ndarray, half_extent: float) -> float:
    q = np.abs(local - center) - half_extent
    outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
    inside = np.minimum(q.max(axis=1), 0.0)
    sd = outside + inside
    return float(math.sqrt(np.mean(sd * sd)))


def fit_cube(points: np.ndarray, yaw: float,
             levels: int = 4, grid: int = 5) -> tuple[Cube, float]:
    """Fixed-yaw cube fit via coarse-to-fine grid search over center and
    half extent."""
    c, s = math.cos(yaw), math.sin(yaw)
    rot = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])  # world -> local
    local = points @ rot.T

    center = local.mean(axis=0)
    half = float(np.mean(np.max(np.abs(local - center), axis=1)))
    span = max(half * 0.8, 0.05)
    best = (_box_rms(local, center, half), center, half)
    for _ in range(levels):
        offsets = np.linspace(-span, span, grid)
        base_c, base_h = best[1], best[2]
        for dx in offsets:
            for dy in offsets:
                for dz in offsets:
                    cand_c = base_c + np.array([dx, dy, dz])
                    for dh in offsets:
                        cand_h = base_h + dh
                        if cand_h <= 1e-4:
                            continue
                        rms = _box_rms(local, cand_c, cand_h)
                        if rms < best[0]:
                            best = (rms, cand_c, cand_h)
        span *= 0.3
    rms, center, half = best
    world_center = rot.T @ center
    return Cube(center=Vec3(*world_center), half_extent=half, yaw=yaw), rms


def classify_shape(contacts: Sequence[Vec3], cube_yaw: float = math.pi / 4) -> ShapeKind:
    """Best-fitting primitive for a cloud of contact points."""
    if len(contacts) < MIN_CONTACTS:
        raise ValueError(
            f"need at least {MIN_CONTACTS} contact points, got {len(contacts)}")
    points = np.array(contacts, dtype=float)

    _, plane_rms = fit_plane(points)
    _, sphere_rms = fit_sphere(points)
    _, cube_rms = fit_cube(points, cube_yaw)

    best_kind, best_rms = ShapeKind.PLANE, plane_rms
    if sphere_rms < best_rms:
        best_kind, best_rms = ShapeKind.SPHERE, sphere_rms
    if cube_rms < best_rms:
        best_kind, best_rms = ShapeKind.CUBE, cube_rms
    return best_kind
