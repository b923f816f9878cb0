import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ethd.geometry import (PLANE_PATCH, Cube, Plane, Sphere, Vec3,
                           front_projected_distance, nearest_point,
                           sample_surface, shape_from_json, shape_to_dict,
                           shape_to_json, signed_distance)

from conftest import make_shapes, unit_vec


# -- nearest_point --------------------------------------------------------------

def test_sphere_nearest_radial():
    q = nearest_point(Sphere(Vec3(0, 0, 0), 0.1), Vec3(0.2, 0, 0))
    assert q.nearest == Vec3(0.1, 0.0, 0.0)
    assert q.distance == pytest.approx(0.1, abs=1e-12)
    assert q.normal == Vec3(1.0, 0.0, 0.0)


def test_plane_nearest_orthogonal_projection():
    q = nearest_point(Plane(Vec3(0, 0, 0), Vec3(1, 0, 0)), Vec3(0.3, 0.1, 0.2))
    assert q.nearest == Vec3(0.0, 0.1, 0.2)
    assert q.distance == pytest.approx(0.3, abs=1e-12)


def test_cube_nearest_matches_bruteforce_sampling_oracle():
    # Oracle: minimum distance over a million uniformly sampled surface points.
    cube = Cube(Vec3(0, 0, 0), 0.1, math.pi / 4)
    p = Vec3(0.3, 0.0, 0.0)
    samples = np.array(sample_surface(cube, 10 ** 6, seed=99))
    brute = float(np.min(np.linalg.norm(samples - np.array(p), axis=1)))
    got = nearest_point(cube, p).distance
    assert abs(got - brute) < 1e-3
    assert got <= brute + 1e-12  # true nearest can only be closer


@pytest.mark.parametrize("shape", make_shapes())
def test_nearest_minimality_against_surface_samples(shape, rng):
    samples = np.array(sample_surface(shape, 10 ** 4, seed=7))
    for _ in range(20):
        p = Vec3(*rng.uniform(-1.0, 1.5, 3))
        q = nearest_point(shape, p)
        best = float(np.min(np.linalg.norm(samples - np.array(p), axis=1)))
        assert q.distance <= best + 1e-12
        if signed_distance(shape, p) > 0:
            assert abs((p - q.nearest).norm() - q.distance) < 1e-9
        assert q.normal.norm() == pytest.approx(1.0, abs=1e-9)


def test_cube_interior_and_edge_normals():
    cube = Cube(Vec3(0, 0, 0), 0.1, 0.0)
    center = nearest_point(cube, Vec3(0.0, 0.0, 0.0))
    assert center.distance == pytest.approx(0.1, abs=1e-12)
    # Point exactly on an edge: normal blends both touching faces.
    edge = nearest_point(cube, Vec3(0.1, 0.1, 0.0))
    expect = 1.0 / math.sqrt(2.0)
    assert edge.distance == 0.0
    assert edge.normal.x == pytest.approx(expect, abs=1e-12)
    assert edge.normal.y == pytest.approx(expect, abs=1e-12)


# -- signed_distance --------------------------------------------------------------

def test_signed_distance_trivials():
    assert signed_distance(Sphere(Vec3(0, 0, 0), 0.1), Vec3(0, 0, 0)) == pytest.approx(-0.1)
    assert signed_distance(Plane(Vec3(0, 0, 0), Vec3(1, 0, 0)),
                           Vec3(-0.2, 0, 0)) == pytest.approx(-0.2)
    cube = Cube(Vec3(0, 0, 0), 0.1, math.pi / 4)
    assert signed_distance(cube, Vec3(0, 0, 0)) == pytest.approx(-0.1)


@pytest.mark.parametrize("shape", make_shapes())
def test_signed_distance_magnitude_matches_nearest(shape, rng):
    for _ in range(200):
        p = Vec3(*rng.uniform(-1.0, 1.5, 3))
        assert abs(signed_distance(shape, p)) == pytest.approx(
            nearest_point(shape, p).distance, abs=1e-12)


@pytest.mark.parametrize("shape", make_shapes())
def test_signed_distance_is_1_lipschitz(shape, rng):
    for _ in range(500):
        p = Vec3(*rng.uniform(-1.0, 2.0, 3))
        q = Vec3(*rng.uniform(-1.0, 2.0, 3))
        assert abs(signed_distance(shape, p) - signed_distance(shape, q)) \
            <= (p - q).norm() + 1e-9


# -- front_projected_distance ------------------------------------------------------

def test_ray_trivials():
    plane = Plane(Vec3(0, 0, 0), Vec3(1, 0, 0))
    assert front_projected_distance(plane, Vec3(0.3, 0, 0),
                                    Vec3(-1, 0, 0)) == pytest.approx(0.3)
    sphere = Sphere(Vec3(0, 0, 0), 0.1)
    assert front_projected_distance(sphere, Vec3(0.3, 0, 0),
                                    Vec3(-1, 0, 0)) == pytest.approx(0.2)
    assert front_projected_distance(sphere, Vec3(0.3, 0, 0), Vec3(1, 0, 0)) is None
    assert front_projected_distance(plane, Vec3(0.3, 0, 0), Vec3(0, 1, 0)) is None


def test_ray_from_inside_exits():
    sphere = Sphere(Vec3(0, 0, 0), 0.1)
    assert front_projected_distance(sphere, Vec3(0, 0, 0),
                                    Vec3(1, 0, 0)) == pytest.approx(0.1)
    cube = Cube(Vec3(0, 0, 0), 0.1, 0.0)
    assert front_projected_distance(cube, Vec3(0, 0, 0),
                                    Vec3(0, 0, 1)) == pytest.approx(0.1)


@pytest.mark.parametrize("shape", make_shapes())
def test_ray_hit_no_closer_than_nearest(shape, rng):
    hits = 0
    for _ in range(300):
        p = Vec3(*rng.uniform(-0.5, 1.5, 3))
        d = unit_vec(rng)
        s = front_projected_distance(shape, p, d)
        if s is not None:
            hits += 1
            assert s >= nearest_point(shape, p).distance - 1e-9
    assert hits > 0


def test_ray_requires_unit_direction():
    with pytest.raises(ValueError):
        front_projected_distance(Sphere(Vec3(0, 0, 0), 0.1), Vec3(1, 0, 0),
                                 Vec3(0.5, 0, 0))


# -- rotated cube equals conjugated axis-aligned cube ------------------------------

@given(yaw=st.floats(0.0, 2.0 * math.pi - 1e-9),
       px=st.floats(-1.0, 1.0), py=st.floats(-1.0, 1.0), pz=st.floats(-1.0, 1.0))
@settings(max_examples=200, deadline=None)
def test_rotated_cube_is_conjugated_aabb(yaw, px, py, pz):
    rotated = Cube(Vec3(0.2, -0.1, 0.05), 0.12, yaw)
    aabb = Cube(Vec3(0.0, 0.0, 0.0), 0.12, 0.0)
    p = Vec3(px, py, pz)
    c, s = math.cos(-yaw), math.sin(-yaw)
    rel = p - rotated.center
    local = Vec3(c * rel.x - s * rel.y, s * rel.x + c * rel.y, rel.z)
    assert abs(nearest_point(rotated, p).distance
               - nearest_point(aabb, local).distance) < 1e-9
    assert abs(signed_distance(rotated, p) - signed_distance(aabb, local)) < 1e-9


# -- sample_surface ----------------------------------------------------------------

def test_sample_surface_on_surface_and_deterministic():
    for shape in make_shapes():
        pts = sample_surface(shape, 1000, seed=3)
        assert len(pts) == 1000
        for p in pts[::37]:
            assert abs(signed_distance(shape, p)) <= 1e-9
        assert pts == sample_surface(shape, 1000, seed=3)
        assert pts != sample_surface(shape, 1000, seed=4)


def test_sample_surface_sphere_radius_exact():
    sphere = Sphere(Vec3(0, 0, 0), 0.1)
    for p in sample_surface(sphere, 1000, seed=1):
        assert abs(p.norm() - 0.1) <= 1e-9


def test_sample_surface_plane_stays_in_patch():
    plane = Plane(Vec3(0.5, 0.0, 0.0), Vec3(-1.0, 0.0, 0.0))
    half = PLANE_PATCH / 2.0
    for p in sample_surface(plane, 100, seed=5):
        rel = p - plane.point
        assert abs(rel.x) < 1e-12
        assert abs(rel.y) <= half + 1e-12
        assert abs(rel.z) <= half + 1e-12


def test_sample_surface_rejects_zero():
    with pytest.raises(ValueError):
        sample_surface(Sphere(Vec3(0, 0, 0), 0.1), 0, seed=0)


# -- validation and JSON ------------------------------------------------------------

def test_shape_invariants_enforced():
    with pytest.raises(ValueError):
        Plane(Vec3(0, 0, 0), Vec3(0.5, 0, 0))
    with pytest.raises(ValueError):
        Sphere(Vec3(0, 0, 0), -0.1)
    with pytest.raises(ValueError):
        Cube(Vec3(0, 0, 0), 0.0)
    assert Cube(Vec3(0, 0, 0), 0.1, 2.5 * math.pi).yaw == pytest.approx(0.5 * math.pi)


def test_shape_json_field_names():
    sphere = Sphere(Vec3(1.0, 2.0, 3.0), 0.1)
    assert json.loads(shape_to_json(sphere)) == {
        "kind": "sphere", "center": [1.0, 2.0, 3.0], "radius": 0.1}
    plane = Plane(Vec3(0.0, 0.0, 0.0), Vec3(0.0, 0.0, 1.0))
    assert set(shape_to_dict(plane)) == {"kind", "point", "normal"}
    cube = Cube(Vec3(0.0, 0.0, 0.0), 0.2, 0.7)
    assert set(shape_to_dict(cube)) == {"kind", "center", "half_extent", "yaw"}


def test_shape_json_round_trip():
    for shape in make_shapes():
        assert shape_from_json(shape_to_json(shape)) == shape
    with pytest.raises(ValueError):
        shape_from_json('{"kind":"donut"}')
