"""Global nearest-neighbor data association via a rectangular assignment solver."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .detection import Detection


@dataclass(frozen=True)
class Assignment:
    """Matched (track_index, detection_index) pairs plus the leftovers of each side."""

    pairs: tuple[tuple[int, int], ...]
    unassigned_tracks: tuple[int, ...]
    unassigned_detections: tuple[int, ...]


def _min_cost_rows(costs: np.ndarray) -> list[int]:
    """Column matched to each row of a rows<=cols matrix, minimizing total cost.

    Shortest-augmenting-path formulation with row/column potentials; one
    augmentation per row keeps it O(rows^2 * cols).
    """
    n, m = costs.shape
    u = [0.0] * (n + 1)
    v = [0.0] * (m + 1)
    match = [0] * (m + 1)  # match[j]: 1-based row assigned to column j
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        min_slack = [math.inf] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = math.inf
            j1 = 0
            for j in range(1, m + 1):
                if used[j]:
                    continue
                slack = costs[i0 - 1, j - 1] - u[i0] - v[j]
                if slack < min_slack[j]:
                    min_slack[j] = slack
                    way[j] = j0
                if min_slack[j] < delta:
                    delta = min_slack[j]
                    j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    min_slack[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    row_to_col = [-1] * n
    for j in range(1, m + 1):
        if match[j] > 0:
            row_to_col[match[j] - 1] = j - 1
    return row_to_col


def munkres(costs: np.ndarray | Sequence[Sequence[float]]) -> Assignment:
    """Minimum-total-cost assignment of a rectangular cost matrix.

    Exactly min(rows, cols) pairs are produced; the surplus rows or columns of
    the longer side are reported as unassigned.
    """
    a = np.asarray(costs, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"cost matrix must be 2-d and non-empty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("cost matrix entries must be finite")
    rows, cols = a.shape
    if rows <= cols:
        row_to_col = _min_cost_rows(a)
        pairs = tuple((r, c) for r, c in enumerate(row_to_col) if c >= 0)
    else:
        col_to_row = _min_cost_rows(a.T)
        pairs = tuple(
            sorted((r, c) for c, r in enumerate(col_to_row) if r >= 0)
        )
    matched_rows = {r for r, _ in pairs}
    matched_cols = {c for _, c in pairs}
    return Assignment(
        pairs,
        tuple(r for r in range(rows) if r not in matched_rows),
        tuple(c for c in range(cols) if c not in matched_cols),
    )


def gnn_associate(
    track_positions: Sequence[tuple[float, float]],
    detections: Sequence[Detection],
    gate: float,
) -> Assignment:
    """Globally optimal track-to-detection pairing on Euclidean centroid distance.

    Pairs whose distance exceeds the gate are dissolved into the unassigned
    lists; either side being empty yields no pairs at all.
    """
    if not gate > 0:
        raise ValueError(f"gate must be > 0, got {gate}")
    n_tracks, n_dets = len(track_positions), len(detections)
    if n_tracks == 0 or n_dets == 0:
        return Assignment((), tuple(range(n_tracks)), tuple(range(n_dets)))
    centers = np.array(
        [(d.rect.cx, d.rect.cy) for d in detections], dtype=np.float64
    )
    positions = np.asarray(track_positions, dtype=np.float64)
    costs = np.hypot(
        positions[:, 0:1] - centers[None, :, 0],
        positions[:, 1:2] - centers[None, :, 1],
    )
    raw = munkres(costs)
    pairs = tuple((t, d) for t, d in raw.pairs if costs[t, d] <= gate)
    matched_tracks = {t for t, _ in pairs}
    matched_dets = {d for _, d in pairs}
    return Assignment(
        pairs,
        tuple(t for t in range(n_tracks) if t not in matched_tracks),
        tuple(d for d in range(n_dets) if d not in matched_dets),
    )
