import math

import pytest

from ethd.geometry import Cube, Plane, Sphere, Vec3, signed_distance
from ethd.scripting import (ApproachSpec, OrbitSlideSpec, PokeGridSpec,
                            poke_index, scripted_hand, spec_duration_ms)

from conftest import make_shapes

SPHERE = Sphere(Vec3(0.5, 0.0, 0.0), 0.15)


def test_approach_distance_closed_form():
    spec = ApproachSpec(shape=SPHERE, contact_point=Vec3(0.35, 0.0, 0.0),
                        start_distance=0.4, speed=0.2)
    for t_ms in range(0, 2001, 100):
        hand = scripted_hand(spec, t_ms)
        want = max(0.4 - 0.2 * t_ms / 1000.0, 0.0)
        assert hand.d_v == pytest.approx(want, abs=1e-9)
        assert hand.t_ms == t_ms
    # Terminal pose: holds at the contact point past the duration.
    end = scripted_hand(spec, spec_duration_ms(spec) + 5000)
    assert end.pos == pytest.approx((0.35, 0.0, 0.0), abs=1e-9)


@pytest.mark.parametrize("shape", make_shapes())
def test_orbit_slide_stays_on_surface(shape):
    spec = OrbitSlideSpec(shape=shape, angular_rate=1.0, standoff=0.0)
    for t_ms in range(0, spec_duration_ms(spec), 97):
        hand = scripted_hand(spec, t_ms)
        assert abs(signed_distance(shape, hand.pos)) <= 1e-9
        assert hand.buttons.draw


@pytest.mark.parametrize("shape", make_shapes())
def test_orbit_slide_standoff_is_exact(shape):
    spec = OrbitSlideSpec(shape=shape, angular_rate=1.0, standoff=0.025)
    for t_ms in range(0, spec_duration_ms(spec), 131):
        hand = scripted_hand(spec, t_ms)
        assert hand.d_v == pytest.approx(0.025, abs=1e-9)


def test_orbit_radius_must_fit_plane_patch():
    plane = Plane(Vec3(0.5, 0, 0), Vec3(-1.0, 0, 0))
    spec = OrbitSlideSpec(shape=plane, path_radius=0.5)
    with pytest.raises(ValueError):
        scripted_hand(spec, 0)


def test_poke_grid_hand_never_teleports():
    spec = PokeGridSpec(shape=SPHERE, n_points=12, seed=4)
    max_speed = max(spec.speed, spec.transfer_speed)
    prev = scripted_hand(spec, 0).pos
    for t_ms in range(10, spec_duration_ms(spec) + 100, 10):
        cur = scripted_hand(spec, t_ms).pos
        assert (cur - prev).norm() <= max_speed * 0.010 + 1e-9
        prev = cur


def test_poke_grid_dwells_touch_the_surface():
    cube = Cube(Vec3(0.5, 0.0, 0.0), 0.15, math.pi / 4)
    spec = PokeGridSpec(shape=cube, n_points=8, seed=1)
    seen = set()
    for t_ms in range(0, spec_duration_ms(spec), 10):
        idx = poke_index(spec, t_ms)
        if idx is not None:
            hand = scripted_hand(spec, t_ms)
            assert abs(signed_distance(cube, hand.pos)) <= 1e-9
            seen.add(idx)
    assert seen == set(range(8))


def test_poke_grid_deterministic():
    spec = PokeGridSpec(shape=SPHERE, n_points=6, seed=2)
    a = [scripted_hand(spec, t).pos for t in range(0, 5000, 50)]
    b = [scripted_hand(spec, t).pos for t in range(0, 5000, 50)]
    assert a == b
