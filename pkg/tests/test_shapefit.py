import math

import numpy as np
import pytest

from ethd.geometry import (Cube, Plane, ShapeKind, Sphere, Vec3, sample_surface)
from ethd.shapefit import classify_shape, fit_cube, fit_plane, fit_sphere

SPHERE = Sphere(Vec3(0.5, 0.0, 0.0), 0.15)
PLANE = Plane(Vec3(0.5, 0.0, 0.0), Vec3(-1.0, 0.0, 0.0))
CUBE = Cube(Vec3(0.5, 0.0, 0.0), 0.15, math.pi / 4)


def _points(shape, n, seed=0):
    return np.array(sample_surface(shape, n, seed))


def test_fit_sphere_exact_points():
    sphere, rms = fit_sphere(_points(SPHERE, 50))
    assert rms < 1e-9
    assert sphere.radius == pytest.approx(0.15, abs=1e-9)
    assert np.allclose(tuple(sphere.center), (0.5, 0.0, 0.0), atol=1e-9)


def test_fit_plane_exact_points():
    plane, rms = fit_plane(_points(PLANE, 50))
    assert rms < 1e-9
    assert abs(plane.normal.x) == pytest.approx(1.0, abs=1e-9)


def test_fit_cube_recovers_parameters():
    cube, rms = fit_cube(_points(CUBE, 200), yaw=math.pi / 4)
    assert rms < 2e-3
    assert cube.half_extent == pytest.approx(0.15, abs=5e-3)
    assert np.allclose(tuple(cube.center), (0.5, 0.0, 0.0), atol=5e-3)


def test_classify_exact_clouds():
    assert classify_shape(sample_surface(SPHERE, 50, 1)) is ShapeKind.SPHERE
    assert classify_shape(sample_surface(PLANE, 50, 2)) is ShapeKind.PLANE
    assert classify_shape(sample_surface(CUBE, 50, 3)) is ShapeKind.CUBE


@pytest.mark.parametrize("shape,kind", [
    (SPHERE, ShapeKind.SPHERE), (PLANE, ShapeKind.PLANE), (CUBE, ShapeKind.CUBE)])
def test_classify_with_5mm_noise(shape, kind):
    rng = np.random.default_rng(9)
    for trial in range(10):
        pts = _points(shape, 24, seed=trial)
        noisy = pts + rng.normal(0.0, 0.005, pts.shape)
        assert classify_shape([Vec3(*p) for p in noisy]) is kind


def test_noisy_plane_still_wins_over_sphere_fit():
    rng = np.random.default_rng(4)
    pts = _points(PLANE, 40) + rng.normal(0.0, 0.005, (40, 3))
    _, plane_rms = fit_plane(pts)
    _, sphere_rms = fit_sphere(pts)
    assert plane_rms < 0.01
    assert sphere_rms > 5 * plane_rms


def test_sphere_radius_cap_rejects_workspace_scale_fits():
    big = Sphere(Vec3(0.0, 0.0, 0.0), 2.0)
    sphere, rms = fit_sphere(_points(big, 60))
    assert sphere is None and math.isinf(rms)


def test_classify_requires_minimum_points():
    with pytest.raises(ValueError):
        classify_shape(sample_surface(SPHERE, 11, 1))
