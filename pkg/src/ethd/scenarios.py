"""Headless experiment runs: approach tracking, surface slides, and the
probe-and-classify recognition study, each driven by scripted hand sources
through a full session.

Every run is seeded and returns both a summary and the recorded episodes,
so any scenario can be replayed bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .calibration import RigidTransform, apply_transform
from .control import ContactPhase
from .geometry import Shape, ShapeKind, Sphere, Vec3, sample_surface, shape_kind
from .robotsim import RobotLimits
from .scripting import (ApproachSpec, OrbitSlideSpec, PokeGridSpec, poke_index,
                        scripted_hand, spec_duration_ms)
from .session import (Episode, Session, SessionConfig, default_object_set,
                      trajectory_surface_error)
from .shapefit import classify_shape

# Object anchor sits DEFAULT_OBJECT_DISTANCE in front of the headset; the
# robot base goes this far along the same axis. 1.1 m keeps even the rotated
# cube's front corner (0.29 m from the headset) inside the 0.9 m reach.
ROBOT_BASE_DISTANCE = 1.1

_KINDS = (ShapeKind.PLANE, ShapeKind.SPHERE, ShapeKind.CUBE)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random proper rotation from a normalized quaternion."""
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def random_rigid_transform(rng: np.random.Generator,
                           translation_scale: float = 0.5) -> RigidTransform:
    r = random_rotation(rng)
    t = rng.uniform(-translation_scale, translation_scale, 3)
    return RigidTransform(r, Vec3(*t))


def scenario_config(seed: int, calib: Optional[RigidTransform] = None,
                    object_set: Optional[list[Shape]] = None) -> SessionConfig:
    """Session config whose robot-frame origins are consistent with the
    given tracked-to-robot calibration."""
    if calib is None:
        calib = random_rigid_transform(np.random.default_rng(seed))
    o_headset = apply_transform(calib, Vec3(0.0, 0.0, 0.0))
    o_robot = apply_transform(calib, Vec3(ROBOT_BASE_DISTANCE, 0.0, 0.0))
    limits_origin = o_robot
    return SessionConfig(
        limits=RobotLimits(workspace_origin=limits_origin),
        o_robot=o_robot, o_headset=o_headset, calib=calib,
        object_set=object_set if object_set is not None else default_object_set(),
        rng_seed=seed)


def _run_scripted(session: Session, spec, extra_ms: int = 0):
    """Drive a session with a scripted hand from t=0 through the spec (plus
    slack), recording; returns (episode, per-tick hand updates)."""
    session.start_recording()
    hands = []
    duration = spec_duration_ms(spec) + extra_ms
    t = 0
    while t < duration:
        t += session.config.tick_ms
        hand = scripted_hand(spec, t)
        hands.append(hand)
        session.tick(hand)
    return session.stop_recording(), hands


# -- approach ------------------------------------------------------------------

@dataclass
class ApproachResult:
    steady_state_gap: float
    contact_latency_ticks: int
    episode: Episode


def run_approach(seed: int, shape: Optional[Shape] = None,
                 hand_speed: float = 0.2, start_distance: float = 0.4,
                 steady_window_ms: int = 500) -> ApproachResult:
    """One scripted approach; measures the steady-state |d_r - d_v| gap over
    the window before contact and how fast the contact phase fires."""
    rng = np.random.default_rng(seed)
    config = scenario_config(seed, calib=random_rigid_transform(rng))
    session = Session(config)
    if shape is not None:
        session.config.object_set[session.object_index] = shape
    target_point = sample_surface(session.shape, 1, seed=int(rng.integers(2 ** 31)))[0]
    spec = ApproachSpec(shape=session.shape, contact_point=target_point,
                        start_distance=start_distance, speed=hand_speed)

    episode, _ = _run_scripted(session, spec)
    samples = episode.record.samples
    eps = config.eps_contact

    hit = next((i for i, s in enumerate(samples) if s.d_v <= eps), None)
    if hit is None:
        raise RuntimeError("approach never reached the contact threshold")
    contact = next((i for i, s in enumerate(samples[hit:], start=hit)
                    if s.phase is ContactPhase.CONTACT), None)
    latency = (contact - hit) if contact is not None else -1

    window = max(1, steady_window_ms // config.tick_ms)
    steady = samples[max(0, hit - window):hit]
    gap = max(abs(s.d_r - s.d_v) for s in steady)
    return ApproachResult(steady_state_gap=gap, contact_latency_ticks=latency,
                          episode=episode)


# -- surface slide (drawing) -----------------------------------------------------

@dataclass
class SlideResult:
    mean_error: float
    max_error: float
    n_samples: int
    episode: Episode


def run_slide(seed: int, standoff: float = 0.0, shape: Optional[Shape] = None,
              angular_rate: float = 0.5) -> SlideResult:
    """Orbit the object surface with the draw button held; reports the
    hand-to-surface error over the drawn trajectory."""
    config = scenario_config(seed)
    session = Session(config)
    sphere = shape if shape is not None else Sphere(center=Vec3(0.5, 0.0, 0.0),
                                                    radius=0.15)
    session.config.object_set[session.object_index] = sphere
    spec = OrbitSlideSpec(shape=sphere, angular_rate=angular_rate, standoff=standoff)

    episode, _ = _run_scripted(session, spec)
    stats = trajectory_surface_error(episode.record, sphere)
    return SlideResult(mean_error=stats.mean, max_error=stats.max,
                       n_samples=stats.n, episode=episode)


# -- recognition study (probe and classify) --------------------------------------

@dataclass
class RecognitionResult:
    accuracy: float
    confusion: list[list[int]]  # rows: true plane/sphere/cube; cols: predicted
    n_trials: int
    contact_noise: float
    episodes: list[Episode] = field(default_factory=list)


def run_recognition(n_trials: int = 30, seed: int = 0, contact_noise: float = 0.0,
                    points_per_trial: int = 24) -> RecognitionResult:
    """Seeded trials of: pick a hidden object, poke it through the full
    session loop, classify from the contact cloud."""
    rng = np.random.default_rng(seed)
    confusion = [[0, 0, 0] for _ in _KINDS]
    episodes: list[Episode] = []

    for trial in range(n_trials):
        trial_seed = int(rng.integers(2 ** 31))
        config = scenario_config(trial_seed)
        session = Session(config)
        session.switch_object()  # hidden ground truth, uniform via session RNG
        session.set_visibility(False)
        truth = shape_kind(session.shape)

        spec = PokeGridSpec(shape=session.shape, n_points=points_per_trial,
                            seed=trial_seed)
        session.start_recording()
        contacts = _collect_poke_contacts(session, spec)
        episodes.append(session.stop_recording())

        if contact_noise > 0.0:
            noise_rng = np.random.default_rng(trial_seed + 1)
            contacts = [p + Vec3(*noise_rng.normal(0.0, contact_noise, 3))
                        for p in contacts]
        predicted = classify_shape(contacts)
        confusion[_KINDS.index(truth)][_KINDS.index(predicted)] += 1

    correct = sum(confusion[i][i] for i in range(len(_KINDS)))
    return RecognitionResult(accuracy=correct / n_trials, confusion=confusion,
                             n_trials=n_trials, contact_noise=contact_noise,
                             episodes=episodes)


def _collect_poke_contacts(session: Session, spec: PokeGridSpec) -> list[Vec3]:
    """Run the poke script; returns the hand position at the first contact
    tick of each poke that produced one."""
    duration = spec_duration_ms(spec)
    first_contact: dict[int, Vec3] = {}
    t = 0
    while t < duration:
        t += session.config.tick_ms
        hand = scripted_hand(spec, t)
        update = session.tick(hand)
        if update.phase is ContactPhase.CONTACT:
            idx = poke_index(spec, t)
            if idx is not None and idx not in first_contact:
                first_contact[idx] = hand.pos
    return [first_contact[i] for i in sorted(first_contact)]
