"""Desk-scale encountered-type haptic display engine.

Aligns a tracked VR frame to a robot frame, places a simulated end-effector
so real contact coincides with virtual contact, and runs the client/server
loop over newline-delimited JSON.
"""

from .calibration import (CalibrationSample, RigidTransform, alignment_rmse,
                          apply_transform, estimate_rotation, estimate_transform)
from .control import (ContactPhase, PlacementInput, PlacementTarget,
                      contact_phase, facing_from_virtual_normal,
                      placement_target, viewing_axis)
from .geometry import (Cube, Plane, Shape, ShapeKind, Sphere, SurfaceQuery,
                       Vec3, front_projected_distance, nearest_point,
                       sample_surface, signed_distance)
from .protocol import (Buttons, CalibPair, CalibResult, ErrorMsg, HandUpdate,
                       Hello, ObjectState, RobotUpdate, WireMessage, decode,
                       encode)
from .robotsim import (RobotLimits, RobotState, clamp_workspace, detect_contact,
                       step)
from .session import (Session, SessionConfig, TrajectoryRecord,
                      trajectory_surface_error)
from .shapefit import classify_shape

__version__ = "0.1.0"
