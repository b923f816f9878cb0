import math

import numpy as np
import pytest

from ethd.calibration import (CalibrationSample, DegenerateConfigurationError,
                              RigidTransform, TooFewSamplesError, alignment_rmse,
                              apply_transform, center, estimate_rotation,
                              estimate_transform, read_pairs, read_result,
                              rotation_angle_between, write_pairs, write_result)
from ethd.geometry import Vec3
from ethd.scenarios import random_rigid_transform, random_rotation


def _pairs(a: np.ndarray, b: np.ndarray) -> list[CalibrationSample]:
    return [CalibrationSample(Vec3(*x), Vec3(*y)) for x, y in zip(a, b)]


def _cloud(rng, n=486, scale=0.5) -> np.ndarray:
    return rng.uniform(-scale, scale, (n, 3))


RZ90 = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


# -- center ------------------------------------------------------------------------

def test_center_symmetric_pair():
    centered, centroid = center([Vec3(1, 0, 0), Vec3(-1, 0, 0)])
    assert centroid == Vec3(0.0, 0.0, 0.0)
    assert centered == [Vec3(1.0, 0.0, 0.0), Vec3(-1.0, 0.0, 0.0)]


def test_center_single_point():
    centered, centroid = center([Vec3(2, 2, 2)])
    assert centroid == Vec3(2.0, 2.0, 2.0)
    assert centered == [Vec3(0.0, 0.0, 0.0)]


def test_center_sum_is_zero():
    rng = np.random.default_rng(0)
    centered, _ = center([Vec3(*p) for p in _cloud(rng)])
    total = np.abs(np.sum(np.array(centered), axis=0))
    assert np.all(total < 1e-9)


def test_center_rejects_empty():
    with pytest.raises(TooFewSamplesError):
        center([])


# -- estimate_rotation ----------------------------------------------------------------

def test_rotation_identity_when_clouds_match():
    rng = np.random.default_rng(1)
    a = _cloud(rng, 20)
    centered = [Vec3(*p) for p in a - a.mean(axis=0)]
    r = estimate_rotation(centered, centered)
    assert np.abs(r - np.eye(3)).max() < 1e-9


def test_rotation_recovers_known_quarter_turn():
    rng = np.random.default_rng(2)
    a = _cloud(rng, 20)
    b = a @ RZ90.T
    ca = [Vec3(*p) for p in a - a.mean(axis=0)]
    cb = [Vec3(*p) for p in b - b.mean(axis=0)]
    r = estimate_rotation(ca, cb)
    assert np.abs(r - RZ90).max() < 1e-9


def test_rotation_mirrored_planar_input_stays_proper():
    # Classic determinant trap: planar cloud against its mirror image.
    rng = np.random.default_rng(3)
    a = _cloud(rng, 30)
    a[:, 2] = 0.0
    b = a @ np.diag([-1.0, 1.0, 1.0])
    ca = [Vec3(*p) for p in a - a.mean(axis=0)]
    cb = [Vec3(*p) for p in b - b.mean(axis=0)]
    r = estimate_rotation(ca, cb)
    assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-9)
    assert np.abs(r.T @ r - np.eye(3)).max() < 1e-9


def test_rotation_rejects_degenerate_and_short_input():
    line = [Vec3(float(i), float(i), 0.0) for i in range(10)]
    with pytest.raises(DegenerateConfigurationError):
        estimate_rotation(line, line)
    with pytest.raises(TooFewSamplesError):
        estimate_rotation(line[:2], line[:2])
    with pytest.raises(ValueError):
        estimate_rotation(line, line[:5])


def test_rotation_always_proper_over_random_inputs():
    rng = np.random.default_rng(4)
    for _ in range(50):
        a = _cloud(rng, int(rng.integers(3, 40)))
        b = _cloud(rng, len(a))
        ca = [Vec3(*p) for p in a - a.mean(axis=0)]
        cb = [Vec3(*p) for p in b - b.mean(axis=0)]
        try:
            r = estimate_rotation(ca, cb)
        except DegenerateConfigurationError:
            continue
        assert np.abs(r.T @ r - np.eye(3)).max() < 1e-9
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-9)


# -- estimate_transform -----------------------------------------------------------------

def test_transform_identity_for_equal_clouds():
    rng = np.random.default_rng(5)
    a = _cloud(rng, 50)
    tf = estimate_transform(_pairs(a, a))
    assert np.abs(tf.r - np.eye(3)).max() < 1e-9
    assert Vec3(*np.abs(np.asarray(tf.t))) == pytest.approx((0, 0, 0), abs=1e-9)


def test_transform_recovers_synthetic_ground_truth():
    rng = np.random.default_rng(6)
    a = _cloud(rng, 486)
    t = np.array([0.1, 0.2, 0.3])
    b = a @ RZ90.T + t
    tf = estimate_transform(_pairs(a, b))
    assert np.abs(tf.r - RZ90).max() < 1e-9
    assert np.abs(np.asarray(tf.t) - t).max() < 1e-9


def test_transform_noise_statistics_over_seeds():
    # 2.8 mm per-axis noise: rotation within 0.5 deg and translation within
    # 2 mm of truth in at least 95 of 100 seeds.
    ok = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        truth = random_rigid_transform(rng)
        a = _cloud(rng, 486)
        b = a @ truth.r.T + np.asarray(truth.t) + rng.normal(0.0, 0.0028, (486, 3))
        tf = estimate_transform(_pairs(a, b))
        rot_err = rotation_angle_between(tf.r, truth.r)
        t_err = (tf.t - truth.t).norm()
        if rot_err <= math.radians(0.5) and t_err <= 0.002:
            ok += 1
    assert ok >= 95


def test_transform_equivariance_under_rigid_motion():
    rng = np.random.default_rng(7)
    a = _cloud(rng, 60)
    b = _cloud(rng, 60)
    base = estimate_transform(_pairs(a, b))
    extra = random_rigid_transform(rng)
    b2 = b @ extra.r.T + np.asarray(extra.t)
    composed = estimate_transform(_pairs(a, b2))
    want_r = extra.r @ base.r
    want_t = extra.r @ np.asarray(base.t) + np.asarray(extra.t)
    assert np.abs(composed.r - want_r).max() < 1e-9
    assert np.abs(np.asarray(composed.t) - want_t).max() < 1e-9


def test_transform_is_least_squares_optimal():
    rng = np.random.default_rng(8)
    a = _cloud(rng, 80)
    b = a @ RZ90.T + np.array([0.05, -0.02, 0.1]) + rng.normal(0, 0.003, (80, 3))
    samples = _pairs(a, b)
    best = estimate_transform(samples)
    best_rmse = alignment_rmse(best, samples)
    for _ in range(100):
        angle = rng.uniform(-0.1, 0.1)
        axis = rng.standard_normal(3)
        axis /= np.linalg.norm(axis)
        k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]],
                      [-axis[1], axis[0], 0]])
        wobble = np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)
        perturbed = RigidTransform(
            wobble @ best.r, best.t + Vec3(*rng.uniform(-0.01, 0.01, 3)))
        assert alignment_rmse(perturbed, samples) >= best_rmse - 1e-12


def test_transform_rejects_too_few():
    with pytest.raises(TooFewSamplesError):
        estimate_transform(_pairs(np.zeros((2, 3)), np.zeros((2, 3))))


# -- apply_transform / alignment_rmse -------------------------------------------------

def test_apply_identity_and_half_turn():
    ident = RigidTransform.identity()
    assert apply_transform(ident, Vec3(0.3, -0.1, 2.0)) == Vec3(0.3, -0.1, 2.0)
    rz180 = RigidTransform(np.diag([-1.0, -1.0, 1.0]))
    out = apply_transform(rz180, Vec3(1, 0, 0))
    assert abs(out.x + 1.0) < 1e-12 and abs(out.y) < 1e-12 and abs(out.z) < 1e-12


def test_apply_matches_fitted_pairs():
    rng = np.random.default_rng(9)
    a = _cloud(rng, 40)
    b = a @ RZ90.T + np.array([0.4, 0.0, -0.2])
    samples = _pairs(a, b)
    tf = estimate_transform(samples)
    for s in samples[::7]:
        assert (apply_transform(tf, s.a) - s.b).norm() < 1e-9


def test_rmse_noiseless_and_constant_offset():
    rng = np.random.default_rng(10)
    a = _cloud(rng, 100)
    samples = _pairs(a, a)
    assert alignment_rmse(RigidTransform.identity(), samples) < 1e-9
    shifted = _pairs(a, a + np.array([0.01, 0.0, 0.0]))
    assert alignment_rmse(RigidTransform.identity(), shifted) == pytest.approx(
        0.01, abs=1e-12)
    with pytest.raises(TooFewSamplesError):
        alignment_rmse(RigidTransform.identity(), [])


def test_transform_validation_rejects_reflections_and_scale():
    with pytest.raises(ValueError):
        RigidTransform(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(ValueError):
        RigidTransform(np.eye(3) * 1.001)


# -- file formats -----------------------------------------------------------------------

def test_pair_file_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    a = _cloud(rng, 10)
    samples = _pairs(a, a + 0.1)
    path = tmp_path / "pairs.ndjson"
    write_pairs(str(path), samples)
    assert read_pairs(str(path)) == samples


def test_pair_file_bad_line_names_location(tmp_path):
    path = tmp_path / "pairs.ndjson"
    path.write_text('{"a":[0,0,0],"b":[0,0,0]}\n{"a":[1,2]}\n', encoding="utf-8")
    with pytest.raises(Exception) as err:
        read_pairs(str(path))
    assert ":2:" in str(err.value)


def test_result_file_round_trip(tmp_path):
    tf = RigidTransform(RZ90, Vec3(0.1, 0.2, 0.3))
    path = tmp_path / "result.json"
    write_result(str(path), tf, rmse=0.00485, n=486)
    got_tf, rmse, n = read_result(str(path))
    assert np.abs(got_tf.r - tf.r).max() == 0.0
    assert got_tf.t == tf.t
    assert rmse == 0.00485 and n == 486


def test_random_rotation_is_proper():
    rng = np.random.default_rng(12)
    for _ in range(20):
        r = random_rotation(rng)
        assert np.abs(r.T @ r - np.eye(3)).max() < 1e-12
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)
