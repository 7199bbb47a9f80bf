"""Kernel-weighted RGB color histograms and Bhattacharyya similarity.

A histogram is a plain float64 array of length levels**3 summing to 1. Pixels
near the rect center count more than pixels near the border through an
Epanechnikov kernel profile.
"""

from __future__ import annotations

import numpy as np

from .imaging import Frame, Rect, iround

DEFAULT_LEVELS = 4
MIN_LEVELS = 2
MAX_LEVELS = 8


def _check_levels(levels: int) -> None:
    if not MIN_LEVELS <= levels <= MAX_LEVELS:
        raise ValueError(
            f"levels must be within [{MIN_LEVELS}, {MAX_LEVELS}], got {levels}"
        )


def bin_count(levels: int = DEFAULT_LEVELS) -> int:
    _check_levels(levels)
    return levels**3


def bin_index(r: int, g: int, b: int, levels: int = DEFAULT_LEVELS) -> int:
    """Flat bin id of an RGB triple under uniform per-channel quantization.

    With the default 4 levels this is floor(r/64)*16 + floor(g/64)*4 + floor(b/64).
    """
    _check_levels(levels)
    return (
        ((r * levels) >> 8) * levels * levels
        + ((g * levels) >> 8) * levels
        + ((b * levels) >> 8)
    )


def epanechnikov(r: float | np.ndarray) -> float | np.ndarray:
    """Kernel profile: 1 - r**2 inside the unit interval, 0 at and beyond it."""
    arr = np.asarray(r, dtype=np.float64)
    out = np.where(arr < 1.0, 1.0 - arr * arr, 0.0)
    return float(out) if out.ndim == 0 else out


def compute_histogram(
    frame: Frame, rect: Rect, levels: int = DEFAULT_LEVELS
) -> np.ndarray:
    """Kernel-weighted color histogram over the rect, normalized to unit mass.

    Pixel values are sampled on the integer grid anchored at the rounded
    center (clamped at the frame border); kernel distance is measured from the
    exact sub-pixel center to each grid position and normalized by the rect
    diagonal, so every in-rect pixel keeps a strictly positive weight.
    """
    _check_levels(levels)
    xs = iround(rect.cx) + rect.x_offsets()
    ys = iround(rect.cy) + rect.y_offsets()
    gx = np.clip(xs, 0, frame.width - 1)
    gy = np.clip(ys, 0, frame.height - 1)
    pix = frame.pixels[np.ix_(gy, gx)].astype(np.int64)
    bins = (
        ((pix[..., 0] * levels) >> 8) * levels * levels
        + ((pix[..., 1] * levels) >> 8) * levels
        + ((pix[..., 2] * levels) >> 8)
    )
    dx = xs - rect.cx
    dy = ys - rect.cy
    r2 = (dx[None, :] ** 2 + dy[:, None] ** 2) / float(rect.hx**2 + rect.hy**2)
    kernel = np.where(r2 < 1.0, 1.0 - r2, 0.0)
    hist = np.bincount(bins.ravel(), weights=kernel.ravel(), minlength=levels**3)
    return hist / kernel.sum()


def bhattacharyya_coeff(p: np.ndarray, q: np.ndarray) -> float:
    """Similarity of two unit-mass histograms: sum of sqrt(p_u * q_u)."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"histogram shapes differ: {p.shape} vs {q.shape}")
    return float(np.sum(np.sqrt(p * q)))


def bhattacharyya_dist(p: np.ndarray, q: np.ndarray) -> float:
    """Distance derived from the coefficient; clamped so rounding never yields NaN."""
    return float(np.sqrt(max(0.0, 1.0 - bhattacharyya_coeff(p, q))))
