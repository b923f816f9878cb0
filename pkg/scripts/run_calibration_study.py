#!/usr/bin/env python3
"""Alignment residual vs. tracker noise.

Sweeps per-axis Gaussian noise on 486 synthetic point pairs under a random
rigid transform and reports the RMSE distribution over seeds. At 2.8 mm
noise the residual lands around 4.8 mm, the regime a desk-scale rig
operates in.
"""

import argparse

import numpy as np

from ethd.calibration import CalibrationSample, alignment_rmse, estimate_transform
from ethd.geometry import Vec3
from ethd.scenarios import random_rigid_transform


def rmse_for(seed: int, sigma: float, n_pairs: int) -> float:
    rng = np.random.default_rng(seed)
    truth = random_rigid_transform(rng)
    a = rng.uniform(-0.5, 0.5, (n_pairs, 3))
    b = a @ truth.r.T + np.asarray(truth.t) + rng.normal(0.0, sigma, (n_pairs, 3))
    samples = [CalibrationSample(Vec3(*x), Vec3(*y)) for x, y in zip(a, b)]
    return alignment_rmse(estimate_transform(samples), samples)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--pairs", type=int, default=486)
    parser.add_argument("--seeds", type=int, default=50)
    args = parser.parse_args()

    print(f"{'sigma_mm':>9} {'rmse_mean_mm':>13} {'rmse_std_mm':>12}")
    for sigma in (0.0, 0.001, 0.0028, 0.005, 0.01):
        values = [rmse_for(seed, sigma, args.pairs) for seed in range(args.seeds)]
        print(f"{sigma * 1e3:9.1f} {np.mean(values) * 1e3:13.3f} "
              f"{np.std(values) * 1e3:12.3f}")


if __name__ == "__main__":
    main()
