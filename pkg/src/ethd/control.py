"""End-effector target placement.

The real contact coincides with the virtual one when the real
fingertip-to-prop distance equals the virtual fingertip-to-surface
distance. The single controlled degree of freedom is placed along the
viewing axis (headset origin toward robot origin), keeping the prop in
front of the user's hand; lateral components follow the fingertip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .calibration import RigidTransform
from .geometry import Vec3

# A hand closer than this multiple of the contact threshold counts as approaching.
APPROACH_BAND = 5.0

_MIN_AXIS_SEPARATION = 1e-6


class ContactPhase(str, Enum):
    FREE = "free"
    APPROACHING = "approaching"
    CONTACT = "contact"


@dataclass(frozen=True)
class PlacementInput:
    """Fingertip in the robot frame, virtual surface distance, viewing axis,
    and optionally the virtual surface normal at the proximity point."""

    hand_r: Vec3
    d_v: float
    axis: Vec3
    surface_normal_v: Optional[Vec3] = None

    def __post_init__(self) -> None:
        if not self.hand_r.is_finite():
            raise ValueError("hand position must be finite")
        if not (math.isfinite(self.d_v) and self.d_v >= 0.0):
            raise ValueError(f"d_v must be >= 0, got {self.d_v!r}")
        if abs(self.axis.norm() - 1.0) > 1e-9:
            raise ValueError("axis must be unit length")
        if self.surface_normal_v is not None and abs(self.surface_normal_v.norm() - 1.0) > 1e-9:
            raise ValueError("surface normal must be unit length")


@dataclass(frozen=True)
class PlacementTarget:
    position: Vec3
    facing: Vec3


def viewing_axis(o_robot: Vec3, o_headset: Vec3) -> Vec3:
    """Unit vector from the headset origin toward the robot origin."""
    diff = o_robot - o_headset
    if diff.norm() <= _MIN_AXIS_SEPARATION:
        raise ValueError("robot and headset origins coincide; viewing axis undefined")
    return diff.normalized()


def placement_target(inp: PlacementInput, calib: Optional[RigidTransform] = None) -> PlacementTarget:
    """Target satisfying |position - hand| = d_v with the offset along the axis.

    The prop faces back down the viewing axis unless a virtual surface
    normal is supplied, in which case the normal is rotated into the robot
    frame (identity rotation when calib is None).
    """
    position = inp.hand_r + inp.axis * inp.d_v
    if inp.surface_normal_v is None:
        facing = -inp.axis
    elif calib is None:
        facing = inp.surface_normal_v.normalized()
    else:
        facing = facing_from_virtual_normal(inp.surface_normal_v, calib)
    return PlacementTarget(position=position, facing=facing)


def contact_phase(d_v: float, d_r: float, eps: float) -> ContactPhase:
    """Discretize the approach: contact when both distances are within eps."""
    if eps <= 0.0:
        raise ValueError(f"eps must be > 0, got {eps!r}")
    if d_v < 0.0 or d_r < 0.0:
        raise ValueError(f"distances must be >= 0, got d_v={d_v!r}, d_r={d_r!r}")
    if d_v <= eps and d_r <= eps:
        return ContactPhase.CONTACT
    if d_v <= APPROACH_BAND * eps:
        return ContactPhase.APPROACHING
    return ContactPhase.FREE


def facing_from_virtual_normal(n_v: Vec3, calib: RigidTransform) -> Vec3:
    """Rotate a virtual surface normal into the robot frame (rotation only)."""
    if abs(n_v.norm() - 1.0) > 1e-9:
        raise ValueError("normal must be unit length")
    q = calib.r @ [n_v.x, n_v.y, n_v.z]
    return Vec3(float(q[0]), float(q[1]), float(q[2])).normalized()
