import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ethd.control import PlacementTarget
from ethd.geometry import Vec3
from ethd.robotsim import (FACING_RATE, RobotLimits, RobotState, clamp_workspace,
                           detect_contact, step)

DT = 0.01


def _target(pos, facing=Vec3(-1.0, 0.0, 0.0)) -> PlacementTarget:
    return PlacementTarget(position=pos, facing=facing)


def _state(pos=Vec3(0.0, 0.0, 0.0), speed=0.0) -> RobotState:
    return RobotState(ee_pos=pos, ee_facing=Vec3(-1.0, 0.0, 0.0), speed=speed)


# -- step ---------------------------------------------------------------------------

def test_step_saturated_speed_moves_vmax_dt():
    limits = RobotLimits(v_max=1.0, a_max=5.0, reach=10.0)
    out = step(_state(speed=1.0), _target(Vec3(1, 0, 0)), limits, DT)
    assert out.ee_pos == pytest.approx((0.01, 0.0, 0.0), abs=1e-15)


def test_step_fixed_point_when_on_target():
    limits = RobotLimits()
    state = _state(pos=Vec3(0.1, 0.2, 0.3), speed=0.7)
    out = step(state, _target(state.ee_pos), limits, DT)
    assert out.ee_pos == state.ee_pos
    assert out.speed == 0.0


def test_step_settles_within_ramp_bound():
    limits = RobotLimits(v_max=1.0, a_max=5.0, reach=10.0)
    target = _target(Vec3(0.5, 0.0, 0.0))
    state = _state()
    dist = 0.5
    ramp_ticks = math.ceil(limits.v_max / (limits.a_max * DT))
    budget = math.ceil(dist / (limits.v_max * DT)) + ramp_ticks
    gaps = []
    for _ in range(budget):
        state = step(state, target, limits, DT)
        gaps.append((state.ee_pos - target.position).norm())
        if gaps[-1] < 1e-6:
            break
    assert gaps[-1] < 1e-6
    # Strictly decreasing while away from the target.
    assert all(b < a for a, b in zip(gaps, gaps[1:]) if a > 1e-6)


def test_step_speed_ramps_at_amax():
    limits = RobotLimits(v_max=1.0, a_max=5.0, reach=10.0)
    state = _state()
    speeds = []
    for _ in range(25):
        state = step(state, _target(Vec3(10, 0, 0)), limits, DT)
        speeds.append(state.speed)
    diffs = np.diff([0.0] + speeds)
    assert np.all(diffs <= limits.a_max * DT + 1e-12)
    assert speeds[-1] == pytest.approx(limits.v_max)


def test_step_rejects_bad_dt():
    with pytest.raises(ValueError):
        step(_state(), _target(Vec3(1, 0, 0)), RobotLimits(), 0.0)


@given(sx=st.floats(-0.5, 0.5), sy=st.floats(-0.5, 0.5), sz=st.floats(-0.5, 0.5),
       tx=st.floats(-5, 5), ty=st.floats(-5, 5), tz=st.floats(-5, 5),
       speed=st.floats(0.0, 1.0))
@settings(max_examples=300, deadline=None)
def test_step_safety_envelope_any_target(sx, sy, sz, tx, ty, tz, speed):
    limits = RobotLimits(v_max=1.0, a_max=5.0, reach=0.9)
    start, _ = clamp_workspace(Vec3(sx, sy, sz), limits)
    state = _state(pos=start, speed=speed)
    out = step(state, _target(Vec3(tx, ty, tz)), limits, DT)
    assert (out.ee_pos - state.ee_pos).norm() <= limits.v_max * DT + 1e-12
    assert (out.ee_pos - limits.workspace_origin).norm() <= limits.reach + 1e-9


def test_step_workspace_clamp_flag_set():
    limits = RobotLimits(v_max=10.0, a_max=1000.0, reach=0.9)
    state = _state(pos=Vec3(0.89, 0.0, 0.0), speed=10.0)
    out = step(state, _target(Vec3(5.0, 0.0, 0.0)), limits, DT)
    assert out.clamped
    assert (out.ee_pos - limits.workspace_origin).norm() <= limits.reach + 1e-12


def test_step_deterministic_bit_for_bit():
    limits = RobotLimits()
    rng = np.random.default_rng(5)
    targets = [_target(Vec3(*rng.uniform(-0.5, 0.5, 3)),
                       facing=Vec3(*(lambda v: v / np.linalg.norm(v))(
                           rng.standard_normal(3))))
               for _ in range(50)]

    def run():
        state = _state()
        return [state := step(state, t, limits, DT) for t in targets]

    assert run() == run()


def test_step_facing_rate_limited():
    limits = RobotLimits()
    state = _state()  # facing -x
    target = _target(Vec3(0.0, 0.0, 0.0), facing=Vec3(1.0, 0.0, 0.0))
    max_step = FACING_RATE * DT
    prev = state.ee_facing
    for _ in range(200):
        state = step(state, target, limits, DT)
        cos_a = min(1.0, max(-1.0, prev.dot(state.ee_facing)))
        assert math.acos(cos_a) <= max_step + 1e-9
        prev = state.ee_facing
        if (state.ee_facing - target.facing).norm() < 1e-12:
            break
    assert (state.ee_facing - target.facing).norm() < 1e-12


# -- clamp_workspace ---------------------------------------------------------------

def test_clamp_inside_boundary_outside():
    limits = RobotLimits(reach=0.9)
    assert clamp_workspace(Vec3(0.5, 0, 0), limits) == (Vec3(0.5, 0, 0), False)
    clamped, flag = clamp_workspace(Vec3(1.8, 0, 0), limits)
    assert flag and clamped == pytest.approx((0.9, 0.0, 0.0))
    on_edge, flag = clamp_workspace(Vec3(0.9, 0, 0), limits)
    assert not flag and on_edge == Vec3(0.9, 0.0, 0.0)


def test_clamp_respects_offset_origin():
    limits = RobotLimits(reach=0.5, workspace_origin=Vec3(1.0, 0.0, 0.0))
    clamped, flag = clamp_workspace(Vec3(2.0, 0.0, 0.0), limits)
    assert flag and clamped == pytest.approx((1.5, 0.0, 0.0))


# -- detect_contact ------------------------------------------------------------------

def test_detect_contact_threshold_closed():
    p = Vec3(0.1, 0.1, 0.1)
    assert detect_contact(p, p, 0.002)
    assert not detect_contact(p, p + Vec3(0.01, 0, 0), 0.002)
    # Exactly eps apart counts as contact (closed threshold).
    assert detect_contact(Vec3(0, 0, 0), Vec3(0.002, 0, 0), 0.002)
    with pytest.raises(ValueError):
        detect_contact(p, p, 0.0)


def test_limits_validation():
    with pytest.raises(ValueError):
        RobotLimits(v_max=0.0)
    with pytest.raises(ValueError):
        RobotLimits(reach=-1.0)
