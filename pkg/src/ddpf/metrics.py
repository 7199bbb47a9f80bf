"""Tracking quality metrics against ground truth."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .association import munkres
from .errors import EvalError

DEFAULT_LOSS_RADIUS = 20.0


@dataclass(frozen=True)
class TrackEval:
    track_id: int
    truth_id: int
    rmse: float
    lost_fraction: float


@dataclass(frozen=True)
class EvalReport:
    frames: int
    loss_radius: float
    tracks: tuple[TrackEval, ...]
    identity_swaps: int
    mean_rmse: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "frames": self.frames,
            "loss_radius": self.loss_radius,
            "tracks": [
                {
                    "track_id": t.track_id,
                    "truth_id": t.truth_id,
                    "rmse": t.rmse,
                    "lost_fraction": t.lost_fraction,
                }
                for t in self.tracks
            ],
            "identity_swaps": self.identity_swaps,
            "mean_rmse": self.mean_rmse,
        }


def _pairing(estimates: np.ndarray, truth: np.ndarray) -> tuple[tuple[int, int], ...]:
    costs = np.hypot(
        estimates[:, 0:1] - truth[None, :, 0],
        estimates[:, 1:2] - truth[None, :, 1],
    )
    return munkres(costs).pairs


def evaluate(
    trajectories: Mapping[int, np.ndarray],
    truth: Mapping[int, np.ndarray],
    loss_radius: float = DEFAULT_LOSS_RADIUS,
) -> EvalReport:
    """Score estimated trajectories against ground-truth center paths.

    Both mappings go from id to an (frames, 2) array of centers covering the
    same frame range. Track-to-truth correspondence is fixed by an optimal
    pairing on frame 0; a frame counts as an identity swap when re-pairing that
    frame disagrees with the frame-0 pairing, and as lost for a track when its
    center error exceeds loss_radius.
    """
    if not loss_radius > 0:
        raise EvalError(f"loss_radius must be > 0, got {loss_radius}")
    if not trajectories or not truth:
        raise EvalError("trajectories and truth must be non-empty")
    track_ids = sorted(trajectories)
    truth_ids = sorted(truth)
    if len(track_ids) != len(truth_ids):
        raise EvalError(
            f"track count {len(track_ids)} does not match truth target count {len(truth_ids)}"
        )
    try:
        est = np.stack([np.asarray(trajectories[i], dtype=np.float64) for i in track_ids])
        tru = np.stack([np.asarray(truth[i], dtype=np.float64) for i in truth_ids])
    except ValueError as exc:
        raise EvalError(f"inconsistent per-id frame counts: {exc}") from exc
    if est.ndim != 3 or est.shape[2] != 2 or tru.ndim != 3 or tru.shape[2] != 2:
        raise EvalError("trajectories and truth must map ids to (frames, 2) arrays")
    if est.shape[1] != tru.shape[1]:
        raise EvalError(
            f"frame count mismatch: trajectories span {est.shape[1]} frames, "
            f"truth spans {tru.shape[1]}"
        )
    frames = est.shape[1]
    base = _pairing(est[:, 0], tru[:, 0])
    swaps = 0
    for f in range(1, frames):
        if _pairing(est[:, f], tru[:, f]) != base:
            swaps += 1
    tracks = []
    rmses = []
    for t_idx, u_idx in base:
        errors = np.hypot(
            est[t_idx, :, 0] - tru[u_idx, :, 0], est[t_idx, :, 1] - tru[u_idx, :, 1]
        )
        rmse = float(np.sqrt(np.mean(errors**2)))
        lost = float(np.count_nonzero(errors > loss_radius)) / frames
        tracks.append(TrackEval(track_ids[t_idx], truth_ids[u_idx], rmse, lost))
        rmses.append(rmse)
    return EvalReport(
        frames=frames,
        loss_radius=loss_radius,
        tracks=tuple(tracks),
        identity_swaps=swaps,
        mean_rmse=float(np.mean(rmses)),
    )


def per_frame_errors(
    trajectories: Mapping[int, np.ndarray], truth: Mapping[int, np.ndarray]
) -> dict[int, np.ndarray]:
    """Center error per frame for each track, under the frame-0 pairing."""
    track_ids = sorted(trajectories)
    truth_ids = sorted(truth)
    est = np.stack([np.asarray(trajectories[i], dtype=np.float64) for i in track_ids])
    tru = np.stack([np.asarray(truth[i], dtype=np.float64) for i in truth_ids])
    base = _pairing(est[:, 0], tru[:, 0])
    return {
        track_ids[t_idx]: np.hypot(
            est[t_idx, :, 0] - tru[u_idx, :, 0], est[t_idx, :, 1] - tru[u_idx, :, 1]
        )
        for t_idx, u_idx in base
    }
