from __future__ import annotations

import math

import numpy as np
import pytest

from ddpf.histogram import (
    DEFAULT_LEVELS,
    bhattacharyya_coeff,
    bhattacharyya_dist,
    bin_count,
    bin_index,
    compute_histogram,
    epanechnikov,
)
from ddpf.imaging import Frame, Rect


def _solid_frame(color, width=32, height=24) -> Frame:
    pixels = np.zeros((height, width, 3), dtype=np.uint8)
    pixels[:] = color
    return Frame(width, height, pixels)


def test_bin_count_default():
    assert bin_count() == 64
    assert bin_count(2) == 8


def test_bin_index_oracle():
    # floor(64/64)*16 + floor(128/64)*4 + floor(192/64) = 16 + 8 + 3
    assert bin_index(64, 128, 192) == 27
    assert bin_index(0, 0, 0) == 0
    assert bin_index(255, 255, 255) == 63


def test_bin_index_levels_bounds():
    with pytest.raises(ValueError):
        bin_index(0, 0, 0, levels=1)
    with pytest.raises(ValueError):
        bin_index(0, 0, 0, levels=9)


def test_epanechnikov_boundary_values():
    assert epanechnikov(0.0) == 1.0
    assert epanechnikov(1.0) == 0.0
    assert epanechnikov(2.0) == 0.0
    assert math.isclose(epanechnikov(0.5), 0.75)


def test_epanechnikov_vectorized():
    out = epanechnikov(np.array([0.0, 0.5, 1.0, 3.0]))
    assert np.allclose(out, [1.0, 0.75, 0.0, 0.0])


def test_histogram_solid_target_is_single_bin():
    color = (200, 40, 90)
    hist = compute_histogram(_solid_frame(color), Rect(16.0, 12.0, 8, 8))
    assert hist.shape == (64,)
    assert hist[bin_index(*color)] == pytest.approx(1.0)
    assert np.count_nonzero(hist) == 1


def test_histogram_sums_to_one():
    rng = np.random.default_rng(11)
    pixels = rng.integers(0, 256, size=(24, 32, 3), dtype=np.uint8)
    frame = Frame(32, 24, pixels)
    hist = compute_histogram(frame, Rect(10.3, 11.7, 7, 5))
    assert abs(hist.sum() - 1.0) < 1e-9
    assert (hist >= 0).all()


def test_histogram_kernel_weighting_oracle_3x1():
    # Middle pixel one tone, both ends another: weights (0.9, 1.0, 0.9)/2.8.
    pixels = np.zeros((1, 3, 3), dtype=np.uint8)
    pixels[0, 0] = pixels[0, 2] = (255, 0, 0)
    pixels[0, 1] = (0, 255, 0)
    hist = compute_histogram(Frame(3, 1, pixels), Rect(1.0, 0.0, 3, 1))
    assert hist[bin_index(255, 0, 0)] == pytest.approx(1.8 / 2.8)
    assert hist[bin_index(0, 255, 0)] == pytest.approx(1.0 / 2.8)


def test_histogram_center_weighted_over_border():
    # A rect holding equal pixel counts of two tones, one in the middle ring,
    # must weight the centered tone strictly higher.
    pixels = np.zeros((9, 9, 3), dtype=np.uint8)
    pixels[:] = (255, 0, 0)
    pixels[3:6, 3:6] = (0, 0, 255)
    hist = compute_histogram(Frame(9, 9, pixels), Rect(4.0, 4.0, 9, 9))
    inner = hist[bin_index(0, 0, 255)]
    outer = hist[bin_index(255, 0, 0)]
    assert inner > 9 / 81 and outer < 72 / 81


def test_histogram_subpixel_center_shifts_weights():
    pixels = np.zeros((8, 8, 3), dtype=np.uint8)
    pixels[:, :4] = (255, 0, 0)
    pixels[:, 4:] = (0, 0, 255)
    frame = Frame(8, 8, pixels)
    left = compute_histogram(frame, Rect(3.3, 4.0, 6, 6))
    right = compute_histogram(frame, Rect(4.7, 4.0, 6, 6))
    assert left[bin_index(255, 0, 0)] > right[bin_index(255, 0, 0)]


def test_bhattacharyya_oracle_pair():
    p = np.array([0.5, 0.5])
    q = np.array([0.25, 0.75])
    rho = bhattacharyya_coeff(p, q)
    assert rho == pytest.approx(math.sqrt(0.125) + math.sqrt(0.375), abs=1e-12)
    assert bhattacharyya_dist(p, q) == pytest.approx(0.18459191128251448, abs=1e-12)


def test_bhattacharyya_identity_and_disjoint():
    p = np.array([0.2, 0.8, 0.0])
    assert bhattacharyya_coeff(p, p) == pytest.approx(1.0, abs=1e-12)
    assert bhattacharyya_dist(p, p) == pytest.approx(0.0, abs=1e-7)
    q = np.array([0.0, 0.0, 1.0])
    assert bhattacharyya_coeff(p, q) == 0.0
    assert bhattacharyya_dist(p, q) == 1.0


def test_bhattacharyya_shape_mismatch():
    with pytest.raises(ValueError):
        bhattacharyya_coeff(np.ones(4) / 4, np.ones(8) / 8)


def test_histogram_rect_clamped_at_border():
    frame = _solid_frame((10, 200, 10))
    hist = compute_histogram(frame, Rect(0.0, 0.0, 9, 9))
    assert hist[bin_index(10, 200, 10)] == pytest.approx(1.0)


def test_levels_parameter_changes_resolution():
    color_a, color_b = (10, 10, 10), (40, 40, 40)
    frame = _solid_frame(color_a)
    frame.pixels[:, 16:] = color_b
    rect = Rect(16.0, 12.0, 30, 20)
    coarse = compute_histogram(frame, rect, levels=2)
    fine = compute_histogram(frame, rect, levels=8)
    # At 2 levels both tones share bin 0; at 8 they split.
    assert coarse[0] == pytest.approx(1.0)
    assert np.count_nonzero(fine) == 2
    assert fine.shape == (512,)
