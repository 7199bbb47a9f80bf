"""Delimited outputs, JSON documents, and rendered report figures.

Everything written here is byte-deterministic for a given input: fixed float
formatting, insertion-ordered JSON, no timestamps.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .errors import EvalError
from .metrics import EvalReport

TRAJECTORY_HEADER = ("frame", "track_id", "x", "y", "hx", "hy")
TRUTH_HEADER = ("frame", "target_id", "x", "y", "hx", "hy", "visible")


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def write_trajectories_csv(path: Path | str, rows: Iterable[tuple]) -> None:
    """Rows are (frame, track_id, x, y, hx, hy)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRAJECTORY_HEADER)
        for frame, track_id, x, y, hx, hy in rows:
            writer.writerow([frame, track_id, _fmt(x), _fmt(y), hx, hy])


def write_truth_csv(path: Path | str, rows: Iterable[tuple]) -> None:
    """Rows are (frame, target_id, x, y, hx, hy, visible)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRUTH_HEADER)
        for frame, target_id, x, y, hx, hy, visible in rows:
            writer.writerow([frame, target_id, _fmt(x), _fmt(y), hx, hy, _fmt(visible)])


def _read_table(
    path: Path | str, header: tuple[str, ...], what: str
) -> dict[int, list[tuple[int, list[float]]]]:
    by_id: dict[int, list[tuple[int, list[float]]]] = {}
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        first = next(reader, None)
        if first != list(header):
            raise EvalError(
                f"{what} {path}: expected header {','.join(header)}, got "
                f"{','.join(first) if first else 'empty file'}"
            )
        for line, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise EvalError(f"{what} {path}: line {line} has {len(row)} fields")
            try:
                frame, entity = int(row[0]), int(row[1])
                values = [float(v) for v in row[2:]]
            except ValueError as exc:
                raise EvalError(f"{what} {path}: line {line}: {exc}") from exc
            by_id.setdefault(entity, []).append((frame, values))
    if not by_id:
        raise EvalError(f"{what} {path} holds no data rows")
    return by_id


def _to_arrays(
    by_id: dict[int, list[tuple[int, list[float]]]], path: Path | str, what: str
) -> dict[int, np.ndarray]:
    out = {}
    for entity, entries in by_id.items():
        entries.sort(key=lambda e: e[0])
        frames = [f for f, _ in entries]
        if frames != list(range(len(frames))):
            raise EvalError(
                f"{what} {path}: id {entity} must cover frames 0..n-1 exactly once"
            )
        out[entity] = np.array([v for _, v in entries], dtype=np.float64)
    return out


def read_trajectories(path: Path | str) -> dict[int, np.ndarray]:
    """track_id -> (frames, 4) array of x, y, hx, hy."""
    return _to_arrays(_read_table(path, TRAJECTORY_HEADER, "trajectories"), path, "trajectories")


def read_truth(path: Path | str) -> dict[int, np.ndarray]:
    """target_id -> (frames, 5) array of x, y, hx, hy, visible."""
    return _to_arrays(_read_table(path, TRUTH_HEADER, "truth"), path, "truth")


def write_json(path: Path | str, document: Any) -> None:
    Path(path).write_text(json.dumps(document, indent=2) + "\n")


def comparison_rows(
    ddpf_report: EvalReport, sir_report: EvalReport
) -> list[tuple[str, str, str]]:
    """(metric, value with deformation handling, value without) rows."""
    rows = [("mean_rmse", _fmt(ddpf_report.mean_rmse), _fmt(sir_report.mean_rmse))]
    sir_tracks = {t.track_id: t for t in sir_report.tracks}
    for track in ddpf_report.tracks:
        other = sir_tracks[track.track_id]
        rows.append(
            (f"track{track.track_id}_rmse", _fmt(track.rmse), _fmt(other.rmse))
        )
        rows.append(
            (
                f"track{track.track_id}_lost_fraction",
                _fmt(track.lost_fraction),
                _fmt(other.lost_fraction),
            )
        )
    rows.append(
        ("identity_swaps", str(ddpf_report.identity_swaps), str(sir_report.identity_swaps))
    )
    return rows


def write_comparison_csv(path: Path | str, rows: list[tuple[str, str, str]]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["metric", "ddpf", "sir"])
        writer.writerows(rows)


def format_comparison_table(rows: list[tuple[str, str, str]]) -> str:
    header = ("metric", "ddpf", "sir")
    widths = [
        max(len(header[i]), *(len(row[i]) for row in rows)) for i in range(3)
    ]
    lines = [
        "  ".join(header[i].ljust(widths[i]) for i in range(3)),
        "  ".join("-" * widths[i] for i in range(3)),
    ]
    for row in rows:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(3)))
    return "\n".join(lines) + "\n"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


_COLORS = ("tab:blue", "tab:red", "tab:green", "tab:orange", "tab:purple", "tab:cyan")


def save_trajectory_figure(
    path: Path | str,
    trajectories: Mapping[int, np.ndarray],
    truth: Mapping[int, np.ndarray] | None = None,
    title: str = "Estimated trajectories",
) -> None:
    """XY paths of every track; truth paths, when given, are dashed."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for i, track_id in enumerate(sorted(trajectories)):
        xy = np.asarray(trajectories[track_id])
        color = _COLORS[i % len(_COLORS)]
        ax.plot(xy[:, 0], xy[:, 1], color=color, label=f"track {track_id}")
    if truth is not None:
        for i, target_id in enumerate(sorted(truth)):
            xy = np.asarray(truth[target_id])
            color = _COLORS[i % len(_COLORS)]
            ax.plot(xy[:, 0], xy[:, 1], color=color, linestyle="--", alpha=0.6,
                    label=f"truth {target_id}")
    ax.invert_yaxis()  # image coordinates: y grows downward
    ax.set_xlabel("x (px)")
    ax.set_ylabel("y (px)")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, dpi=100)
    plt.close(fig)


def save_error_figure(
    path: Path | str,
    errors: Mapping[int, np.ndarray],
    loss_radius: float,
    title: str = "Center error per frame",
) -> None:
    """Per-track center error curves with the loss radius marked."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for i, track_id in enumerate(sorted(errors)):
        curve = np.asarray(errors[track_id])
        ax.plot(curve, color=_COLORS[i % len(_COLORS)], label=f"track {track_id}")
    ax.axhline(loss_radius, color="black", linestyle=":", label="loss radius")
    ax.set_xlabel("frame")
    ax.set_ylabel("error (px)")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, dpi=100)
    plt.close(fig)


def save_compare_figure(
    path: Path | str,
    ddpf_errors: Mapping[int, np.ndarray],
    sir_errors: Mapping[int, np.ndarray],
    loss_radius: float,
) -> None:
    """Error curves of the two variants side by side, shared axes."""
    plt = _pyplot()
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.2), sharey=True)
    for ax, errors, label in (
        (axes[0], ddpf_errors, "deformation handling on"),
        (axes[1], sir_errors, "deformation handling off"),
    ):
        for i, track_id in enumerate(sorted(errors)):
            ax.plot(
                np.asarray(errors[track_id]),
                color=_COLORS[i % len(_COLORS)],
                label=f"track {track_id}",
            )
        ax.axhline(loss_radius, color="black", linestyle=":", label="loss radius")
        ax.set_xlabel("frame")
        ax.set_title(label)
        ax.legend(loc="best", fontsize=8)
    axes[0].set_ylabel("error (px)")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
