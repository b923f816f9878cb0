#!/usr/bin/env python3
"""Regenerate the wire/geometry fixture vectors shared with the browser
client's test suite (frontend/tests/fixtures/)."""

import json
import math
from pathlib import Path

import numpy as np

from ethd.geometry import (Cube, Plane, Sphere, Vec3, nearest_point,
                           shape_to_dict)
from ethd.protocol import encode
from ethd.scenarios import random_rotation
from ethd.calibration import RigidTransform
from ethd.control import ContactPhase
from ethd.protocol import (Buttons, CalibPair, CalibResult, ErrorMsg,
                           HandUpdate, Hello, ObjectState, RobotUpdate)

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"

SHAPES = [
    Plane(point=Vec3(0.5, 0.0, 0.0), normal=Vec3(-1.0, 0.0, 0.0)),
    Sphere(center=Vec3(0.5, 0.0, 0.0), radius=0.15),
    Cube(center=Vec3(0.5, 0.0, 0.0), half_extent=0.15, yaw=math.pi / 4),
]


def wire_vectors() -> list[bytes]:
    rng = np.random.default_rng(1234)
    tf = RigidTransform(random_rotation(rng), Vec3(0.01, -0.02, 0.3))
    msgs = [
        Hello(role="hand"),
        Hello(role="observer", distance_authority=True),
        HandUpdate(t_ms=0, pos=Vec3(0.0, 0.0, 0.0), d_v=0.1),
        HandUpdate(t_ms=12345, pos=Vec3(0.25, -0.1, 0.075), d_v=0.0123,
                   buttons=Buttons(switch=True, hide=False, draw=True)),
        RobotUpdate(t_ms=10, ee_pos=Vec3(0.2, 0.0, -0.05), d_r=0.31,
                    phase=ContactPhase.FREE, clamped=False),
        RobotUpdate(t_ms=20, ee_pos=Vec3(0.35, 0.0, 0.0), d_r=0.001,
                    phase=ContactPhase.CONTACT, clamped=True),
        ObjectState(shape=SHAPES[0], visible=True),
        ObjectState(shape=SHAPES[1], visible=False),
        ObjectState(shape=SHAPES[2], visible=True),
        CalibPair(a=Vec3(0.1, 0.2, 0.3), b=Vec3(0.4, 0.5, 0.6)),
        CalibResult.from_transform(tf, rmse=0.00485, n=486),
        ErrorMsg(code="busy", detail="a hand client is already connected"),
    ]
    return [encode(m) for m in msgs]


def geometry_cases() -> list[dict]:
    rng = np.random.default_rng(777)
    cases = []
    for shape in SHAPES:
        for _ in range(40):
            p = Vec3(*(np.array([0.5, 0.0, 0.0]) + rng.uniform(-0.6, 0.6, 3)))
            q = nearest_point(shape, p)
            cases.append({"shape": shape_to_dict(shape), "point": list(p),
                          "distance": q.distance, "normal": list(q.normal)})
    return cases


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "protocol_vectors.ndjson", "wb") as fh:
        for line in wire_vectors():
            fh.write(line)
    with open(OUT / "geometry_cases.json", "w", encoding="utf-8") as fh:
        json.dump(geometry_cases(), fh, indent=1)
        fh.write("\n")
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
