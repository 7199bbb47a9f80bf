"""Command-line interface: synth, track, eval, compare.

Exit codes: 0 success, 1 I/O failure, 2 bad scenario or config, 3 tracker
initialization failure, 4 evaluation mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import report, synth
from .config import RunConfig
from .errors import (
    ConfigError,
    DecodeError,
    EvalError,
    InitializationError,
    ScenarioError,
)
from .imaging import (
    Rect,
    draw_overlay,
    frame_filename,
    load_sequence,
    overlay_filename,
    save_frame,
)
from .metrics import DEFAULT_LOSS_RADIUS, evaluate, per_frame_errors
from .tracker import TrackingResult, run

SEED_ENV_VAR = "DDPF_SEED"

_TRACK_COLORS = (
    (255, 64, 64),
    (64, 255, 64),
    (80, 128, 255),
    (255, 255, 64),
    (255, 64, 255),
    (64, 255, 255),
)


def _progress(done: int, total: int) -> None:
    sys.stderr.write(f"\rframe {done}/{total}")
    sys.stderr.flush()
    if done == total:
        sys.stderr.write("\n")


def _parse_set_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _load_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then config file, then flags, then the seed environment override."""
    document: dict[str, Any] = {}
    if args.config:
        config = RunConfig.load(args.config)
        document = config.to_dict()
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, raw = item.split("=", 1)
        document[key] = _parse_set_value(raw)
    if args.seed is not None:
        document["seed"] = args.seed
    if args.expected_targets is not None:
        document["expected_targets"] = args.expected_targets
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            document["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(
                f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}"
            ) from None
    return RunConfig.from_dict(document)


def _write_run_outputs(
    outdir: Path, result: TrackingResult, prefix: str = ""
) -> None:
    report.write_trajectories_csv(
        outdir / f"{prefix}trajectories.csv", result.trajectory_rows()
    )
    report.write_json(outdir / f"{prefix}events.json", result.events)


def _write_overlays(outdir: Path, frames, result: TrackingResult) -> None:
    for f, frame in enumerate(frames):
        rects = []
        for t in range(result.num_tracks):
            x, y = result.estimates[t, f]
            hx, hy = result.dims[t, f]
            rects.append(
                (Rect(float(x), float(y), int(hx), int(hy)), _TRACK_COLORS[t % len(_TRACK_COLORS)])
            )
        image = draw_overlay(frame, rects=rects)
        for t in range(result.num_tracks):
            trail = [tuple(p) for p in result.estimates[t, : f + 1]]
            image = draw_overlay(
                image, trails=[trail], trail_color=_TRACK_COLORS[t % len(_TRACK_COLORS)]
            )
        save_frame(outdir / overlay_filename(f), image)


def _cmd_synth(args: argparse.Namespace) -> int:
    if args.spec:
        try:
            document = json.loads(Path(args.spec).read_text())
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scene file is not valid JSON: {exc}") from exc
        if not isinstance(document, dict):
            raise ScenarioError("scene file must hold a JSON object")
        spec = synth.scene_spec_from_dict(document)
    else:
        if not args.scenario:
            raise ScenarioError(
                f"a scenario name or --spec is required; valid names: "
                f"{', '.join(synth.BUILTIN_SCENARIOS)}"
            )
        spec = synth.builtin_scenario(args.scenario)
    frames, truth = synth.render(spec)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(frames):
        save_frame(outdir / frame_filename(i), frame)
    report.write_truth_csv(outdir / "truth.csv", truth.rows())
    return 0


def _cmd_track(args: argparse.Namespace) -> int:
    config = _load_config(args)
    frames = load_sequence(args.indir)
    result = run(
        frames,
        config,
        record_histograms=args.debug_hist,
        progress=_progress,
    )
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    report.write_json(outdir / "effective_config.json", config.to_dict())
    _write_run_outputs(outdir, result)
    if args.overlay:
        _write_overlays(outdir, frames, result)
    return 0


def _centers(table: dict) -> dict:
    return {key: value[:, :2] for key, value in table.items()}


def _cmd_eval(args: argparse.Namespace) -> int:
    trajectories = _centers(report.read_trajectories(args.trajectories))
    truth = _centers(report.read_truth(args.truth))
    result = evaluate(trajectories, truth, loss_radius=args.loss_radius)
    print(json.dumps(result.to_dict(), indent=2))
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        report.write_json(outdir / "report.json", result.to_dict())
        errors = per_frame_errors(trajectories, truth)
        report.save_error_figure(
            outdir / "eval_error.png", errors, args.loss_radius
        )
        report.save_trajectory_figure(
            outdir / "eval_trajectories.png", trajectories, truth
        )
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    config = _load_config(args)
    frames = load_sequence(args.indir)
    truth = _centers(report.read_truth(Path(args.indir) / "truth.csv"))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    report.write_json(outdir / "effective_config.json", config.to_dict())
    reports = {}
    errors = {}
    for label, enabled in (("ddpf", True), ("sir", False)):
        variant = config.replace(deformation_enabled=enabled)
        sys.stderr.write(f"{label}:\n")
        result = run(frames, variant, progress=_progress)
        _write_run_outputs(outdir, result, prefix=f"{label}_")
        centers = {
            t: result.estimates[t] for t in range(result.num_tracks)
        }
        reports[label] = evaluate(centers, truth, loss_radius=args.loss_radius)
        errors[label] = per_frame_errors(centers, truth)
    rows = report.comparison_rows(reports["ddpf"], reports["sir"])
    report.write_comparison_csv(outdir / "comparison.csv", rows)
    table = report.format_comparison_table(rows)
    (outdir / "comparison.txt").write_text(table)
    report.save_compare_figure(
        outdir / "compare_error.png", errors["ddpf"], errors["sir"], args.loss_radius
    )
    print(table, end="")
    return 0


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON run configuration file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument(
        "--expected-targets", type=int, help="override the expected target count"
    )
    parser.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override any config key (repeatable)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddpf",
        description="Multi-target visual tracking with deformation-aware particle filters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="render a synthetic scene with ground truth")
    p_synth.add_argument("scenario", nargs="?", help=f"one of: {', '.join(synth.BUILTIN_SCENARIOS)}")
    p_synth.add_argument("outdir", help="directory for frames and truth.csv")
    p_synth.add_argument("--spec", help="JSON scene description instead of a builtin name")
    p_synth.set_defaults(func=_cmd_synth)

    p_track = sub.add_parser("track", help="track targets through a frame sequence")
    p_track.add_argument("indir", help="directory of frame_<index>.ppm/.pgm files")
    p_track.add_argument("outdir", help="directory for trajectories, events, config echo")
    p_track.add_argument("--overlay", action="store_true", help="write overlay_<frame>.ppm images")
    p_track.add_argument(
        "--debug-hist",
        action="store_true",
        help="embed model histograms in model-update events",
    )
    _add_config_flags(p_track)
    p_track.set_defaults(func=_cmd_track)

    p_eval = sub.add_parser("eval", help="score trajectories against ground truth")
    p_eval.add_argument("--trajectories", required=True, help="trajectories.csv from track")
    p_eval.add_argument("--truth", required=True, help="truth.csv from synth")
    p_eval.add_argument(
        "--loss-radius",
        type=float,
        default=DEFAULT_LOSS_RADIUS,
        help="error above which a frame counts as lost (px)",
    )
    p_eval.add_argument("--out", help="also write report.json and figures here")
    p_eval.set_defaults(func=_cmd_eval)

    p_cmp = sub.add_parser(
        "compare", help="run with and without deformation handling and tabulate both"
    )
    p_cmp.add_argument("indir", help="directory holding frames and truth.csv")
    p_cmp.add_argument("outdir", help="directory for both runs' outputs and the comparison")
    p_cmp.add_argument(
        "--loss-radius", type=float, default=DEFAULT_LOSS_RADIUS,
        help="error above which a frame counts as lost (px)",
    )
    _add_config_flags(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InitializationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except EvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except DecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
