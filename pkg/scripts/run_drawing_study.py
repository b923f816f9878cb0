#!/usr/bin/env python3
"""Surface-drawing study: slide the scripted hand over the sphere at a few
standoffs and report the trajectory-to-surface error; the recording lands
in --out and replays bit-identically."""

import argparse
from pathlib import Path

from ethd.scenarios import run_slide
from ethd.session import verify_replay, write_episodes


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="drawing_study")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for standoff in (0.0, 0.01, 0.025):
        result = run_slide(seed=args.seed, standoff=standoff)
        path = out / f"slide_{int(standoff * 1000)}mm.ndjson"
        write_episodes(str(path), [result.episode])
        ok, _ = verify_replay(str(path))
        print(f"standoff {standoff * 1e3:5.1f} mm: mean error "
              f"{result.mean_error * 1e3:7.3f} mm, max {result.max_error * 1e3:7.3f} mm, "
              f"n={result.n_samples}, replay {'ok' if ok else 'MISMATCH'}")


if __name__ == "__main__":
    main()
