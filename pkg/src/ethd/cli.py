"""Operator entry points.

    ethd serve     --config cfg.json --port 9750 --ui-port 9751
    ethd simulate  --scenario approach|slide|taski|taskii --seed 7 --out out/
    ethd calibrate --pairs pairs.ndjson --out result.json
    ethd metrics   --recording rec.ndjson [--shape '{"kind":...}']
    ethd replay    --recording rec.ndjson

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path

from .calibration import (CalibrationError, RigidTransform, alignment_rmse,
                          estimate_transform, read_pairs, write_result)
from .geometry import shape_from_json
from .protocol import DEFAULT_TCP_PORT, DEFAULT_WS_PORT
from .scenarios import run_approach, run_recognition, run_slide
from .session import (RecordError, Session, SessionConfig, load_config,
                      read_episodes, trajectory_surface_error, verify_replay,
                      write_episodes, TrajectoryRecord)

log = logging.getLogger(__name__)


def default_config() -> SessionConfig:
    """Identity-calibrated config so `serve` works out of the box."""
    return SessionConfig(calib=RigidTransform.identity())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ethd", description="encountered-type haptic display engine")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("serve", help="run the haptic server")
    p.add_argument("--config", help="session config JSON (default: built-in)")
    p.add_argument("--port", type=int, default=DEFAULT_TCP_PORT)
    p.add_argument("--ui-port", type=int, default=DEFAULT_WS_PORT)
    p.add_argument("--host", default="0.0.0.0")

    p = sub.add_parser("simulate", help="run a scripted experiment headless")
    p.add_argument("--scenario", required=True,
                   choices=["approach", "slide", "taski", "taskii"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--noise", type=float, default=0.0,
                   help="contact noise sigma for taski, meters")
    p.add_argument("--standoff", type=float, default=0.0,
                   help="surface standoff for slide, meters")
    p.add_argument("--trials", type=int, default=None,
                   help="trial count (approach: directions, taski: probes)")

    p = sub.add_parser("calibrate", help="fit a rigid transform from a pairs file")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("metrics", help="surface-error stats for a recording")
    p.add_argument("--recording", required=True)
    p.add_argument("--shape", help="shape JSON; defaults to the recording's object")

    p = sub.add_parser("replay", help="re-simulate a recording and verify it")
    p.add_argument("--recording", required=True)
    return parser


def _cmd_serve(args) -> int:
    if args.config is not None:
        config = load_config(args.config)
    else:
        config = default_config()
    session = Session(config)

    async def run() -> None:
        from .server import serve
        server = await serve(session, host=args.host, tcp_port=args.port,
                             ws_port=args.ui_port)
        print(f"listening on tcp :{server.tcp_port} and ws :{server.ws_port} "
              f"(tick {config.tick_ms} ms, "
              f"{'calibrated' if session.calibrated else 'awaiting calibration'})")
        try:
            await server.serve_forever()
        finally:
            await server.stop()

    try:
        asyncio.run(run())
    except KeyboardInterrupt:
        print("interrupted")
    return 0


def _cmd_simulate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    recording = out / f"{args.scenario}.ndjson"

    if args.scenario == "approach":
        trials = args.trials or 1
        results = [run_approach(args.seed + i) for i in range(trials)]
        episodes = [r.episode for r in results]
        summary = {
            "scenario": "approach", "seed": args.seed, "trials": trials,
            "steady_state_gap": max(r.steady_state_gap for r in results),
            "contact_latency_ticks": max(r.contact_latency_ticks for r in results),
        }
        digest = (f"approach: steady-state gap {summary['steady_state_gap']:.6g} m, "
                  f"contact latency {summary['contact_latency_ticks']} tick(s)")
    elif args.scenario == "slide":
        r = run_slide(args.seed, standoff=args.standoff)
        episodes = [r.episode]
        summary = {"scenario": "slide", "seed": args.seed, "standoff": args.standoff,
                   "mean_error": r.mean_error, "max_error": r.max_error,
                   "n_samples": r.n_samples}
        digest = f"slide: mean error {r.mean_error:.6g} m over {r.n_samples} samples"
    elif args.scenario == "taski":
        trials = args.trials or 30
        r = run_recognition(n_trials=trials, seed=args.seed,
                            contact_noise=args.noise)
        episodes = r.episodes
        summary = {"scenario": "taski", "seed": args.seed, "n_trials": r.n_trials,
                   "contact_noise": r.contact_noise, "accuracy": r.accuracy,
                   "confusion": r.confusion,
                   "labels": ["plane", "sphere", "cube"]}
        digest = (f"taski: accuracy {r.accuracy:.1%} over {r.n_trials} trials "
                  f"(noise {r.contact_noise} m)")
    else:  # taskii
        on = run_slide(args.seed, standoff=0.0)
        off = run_slide(args.seed, standoff=0.025)
        episodes = [on.episode, off.episode]
        summary = {
            "scenario": "taskii", "seed": args.seed,
            "on_surface": {"mean_error": on.mean_error, "max_error": on.max_error,
                           "n_samples": on.n_samples},
            "offset_25mm": {"mean_error": off.mean_error, "max_error": off.max_error,
                            "n_samples": off.n_samples},
        }
        digest = (f"taskii: on-surface mean {on.mean_error:.6g} m, "
                  f"+25mm fixture mean {off.mean_error:.6g} m")

    write_episodes(str(recording), episodes)
    summary_path = out / f"{args.scenario}_summary.json"
    summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(digest)
    print(f"wrote {recording} and {summary_path}")
    return 0


def _cmd_calibrate(args) -> int:
    samples = read_pairs(args.pairs)
    tf = estimate_transform(samples)
    rmse = alignment_rmse(tf, samples)
    if len(samples) < 20:
        print(f"warning: only {len(samples)} pairs; expect a poorly "
              f"conditioned fit", file=sys.stderr)
    write_result(args.out, tf, rmse, len(samples))
    print(f"n={len(samples)} rmse={rmse:.6g} m")
    return 0


def _load_all_samples(path: str):
    episodes = read_episodes(path)
    if not episodes:
        raise RecordError(f"{path}: recording holds no episodes")
    samples = [s for ep in episodes for s in ep.record.samples]
    return episodes, samples


def _cmd_metrics(args) -> int:
    episodes, samples = _load_all_samples(args.recording)
    shape = shape_from_json(args.shape) if args.shape else episodes[0].shape
    stats = trajectory_surface_error(_concat_record(samples), shape)
    print(f"mean={stats.mean:.6g} m max={stats.max:.6g} m n={stats.n}")
    return 0


def _concat_record(samples) -> TrajectoryRecord:
    # Episodes restart their clocks, so bypass the monotonicity check.
    rec = TrajectoryRecord.__new__(TrajectoryRecord)
    rec.samples = list(samples)
    return rec


def _cmd_replay(args) -> int:
    ok, detail = verify_replay(args.recording)
    print(("replay ok: " if ok else "replay MISMATCH: ") + detail)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"serve": _cmd_serve, "simulate": _cmd_simulate,
                "calibrate": _cmd_calibrate, "metrics": _cmd_metrics,
                "replay": _cmd_replay}
    try:
        return handlers[args.verb](args)
    except (OSError, CalibrationError, RecordError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
