import math

import numpy as np
import pytest

from ethd.geometry import Cube, Plane, Sphere, Vec3


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def unit_vec(rng) -> Vec3:
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return Vec3(*v)


def make_shapes() -> list:
    return [
        Plane(point=Vec3(0.5, 0.0, 0.0), normal=Vec3(-1.0, 0.0, 0.0)),
        Sphere(center=Vec3(0.5, 0.0, 0.0), radius=0.15),
        Cube(center=Vec3(0.5, 0.0, 0.0), half_extent=0.15, yaw=math.pi / 4),
    ]
