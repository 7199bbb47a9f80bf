from __future__ import annotations

import itertools

import numpy as np
import pytest

from ddpf.association import Assignment, gnn_associate, munkres
from ddpf.detection import Detection
from ddpf.imaging import Rect


def _brute_force_cost(costs: np.ndarray) -> float:
    """Exhaustive minimum assignment cost over all min(rows, cols) pairings.

    Independent oracle: enumerates permutations instead of augmenting paths.
    """
    rows, cols = costs.shape
    if rows <= cols:
        return min(
            sum(costs[r, c] for r, c in enumerate(perm))
            for perm in itertools.permutations(range(cols), rows)
        )
    return min(
        sum(costs[r, c] for c, r in enumerate(perm))
        for perm in itertools.permutations(range(rows), cols)
    )


def _pairs_cost(costs: np.ndarray, assignment: Assignment) -> float:
    return sum(costs[r, c] for r, c in assignment.pairs)


def _detection(cx: float, cy: float) -> Detection:
    return Detection(Rect(cx, cy, 4, 4), 16)


def test_munkres_square_oracle():
    costs = np.array([[4.0, 1.0], [2.0, 3.0]])
    out = munkres(costs)
    assert set(out.pairs) == {(0, 1), (1, 0)}
    assert _pairs_cost(costs, out) == 3.0
    assert out.unassigned_tracks == ()
    assert out.unassigned_detections == ()


def test_munkres_degenerate_ties():
    # Rank-one matrix: every permutation costs the same; any valid pairing is
    # optimal but the total must equal the brute-force minimum of 10.
    costs = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [3.0, 6.0, 9.0]])
    out = munkres(costs)
    assert _pairs_cost(costs, out) == 10.0
    assert sorted(r for r, _ in out.pairs) == [0, 1, 2]
    assert sorted(c for _, c in out.pairs) == [0, 1, 2]


def test_munkres_wide_matrix():
    costs = np.array([[10.0, 1.0, 9.0], [1.0, 10.0, 9.0]])
    out = munkres(costs)
    assert set(out.pairs) == {(0, 1), (1, 0)}
    assert out.unassigned_tracks == ()
    assert out.unassigned_detections == (2,)


def test_munkres_tall_matrix():
    costs = np.array([[10.0, 1.0], [1.0, 10.0], [5.0, 5.0]])
    out = munkres(costs)
    assert set(out.pairs) == {(0, 1), (1, 0)}
    assert out.unassigned_tracks == (2,)
    assert out.unassigned_detections == ()


def test_munkres_single_cell():
    out = munkres([[7.0]])
    assert out.pairs == ((0, 0),)


def test_munkres_matches_brute_force_small_batch():
    rng = np.random.default_rng(5)
    for _ in range(200):
        rows = int(rng.integers(1, 5))
        cols = int(rng.integers(1, 5))
        costs = rng.random((rows, cols)) * 100
        out = munkres(costs)
        assert len(out.pairs) == min(rows, cols)
        assert _pairs_cost(costs, out) == pytest.approx(
            _brute_force_cost(costs), abs=1e-9
        )


def test_munkres_negative_costs():
    costs = np.array([[-5.0, 2.0], [1.0, -7.0]])
    out = munkres(costs)
    assert _pairs_cost(costs, out) == pytest.approx(_brute_force_cost(costs))


def test_munkres_validation():
    with pytest.raises(ValueError):
        munkres(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        munkres(np.zeros(4))
    with pytest.raises(ValueError):
        munkres(np.array([[1.0, np.inf]]))
    with pytest.raises(ValueError):
        munkres(np.array([[1.0, np.nan]]))


def test_gnn_basic_pairing():
    tracks = [(10.0, 10.0), (50.0, 50.0)]
    dets = [_detection(51.0, 49.0), _detection(11.0, 10.0)]
    out = gnn_associate(tracks, dets, gate=20.0)
    assert set(out.pairs) == {(0, 1), (1, 0)}


def test_gnn_gate_dissolves_far_pairs():
    tracks = [(0.0, 0.0), (100.0, 0.0)]
    dets = [_detection(1.0, 0.0), _detection(160.0, 0.0)]
    out = gnn_associate(tracks, dets, gate=20.0)
    assert out.pairs == ((0, 0),)
    assert out.unassigned_tracks == (1,)
    assert out.unassigned_detections == (1,)


def test_gnn_global_not_greedy():
    # Greedy nearest-first would grab (track0, det0) at cost 4 and force
    # track1 to pay 100; the global optimum pays 5 + 6.
    tracks = [(0.0, 0.0), (10.0, 0.0)]
    dets = [_detection(4.0, 0.0), _detection(-5.0, 0.0)]
    out = gnn_associate(tracks, dets, gate=120.0)
    assert set(out.pairs) == {(0, 1), (1, 0)}


def test_gnn_empty_sides():
    out = gnn_associate([], [_detection(0.0, 0.0)], gate=10.0)
    assert out.pairs == ()
    assert out.unassigned_detections == (0,)
    out = gnn_associate([(0.0, 0.0)], [], gate=10.0)
    assert out.pairs == ()
    assert out.unassigned_tracks == (0,)


def test_gnn_more_detections_than_tracks():
    tracks = [(20.0, 20.0)]
    dets = [_detection(90.0, 90.0), _detection(21.0, 20.0), _detection(40.0, 40.0)]
    out = gnn_associate(tracks, dets, gate=15.0)
    assert out.pairs == ((0, 1),)
    assert set(out.unassigned_detections) == {0, 2}


def test_gnn_gate_validation():
    with pytest.raises(ValueError):
        gnn_associate([(0.0, 0.0)], [_detection(0.0, 0.0)], gate=0.0)
