"""Background-subtraction target detection on grayscale frames."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .imaging import GrayFrame, Rect

# 8-connectivity neighborhood.
_NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class Detection:
    """Tight bounding rect of a foreground component and its pixel count."""

    rect: Rect
    area: int


@dataclass
class BackgroundModel:
    reference: GrayFrame


def build_background(frames: Sequence[GrayFrame]) -> BackgroundModel:
    """Per-pixel median of the given frames; a single frame is used verbatim."""
    if not frames:
        raise ValueError("need at least one frame to build a background")
    w, h = frames[0].width, frames[0].height
    for f in frames[1:]:
        if f.width != w or f.height != h:
            raise ValueError("background frames must share dimensions")
    stack = np.stack([f.pixels for f in frames]).astype(np.float64)
    median = np.floor(np.median(stack, axis=0) + 0.5).astype(np.uint8)
    return BackgroundModel(GrayFrame(w, h, median))


def uniform_fill(model: BackgroundModel) -> BackgroundModel:
    """Reference collapsed to its single dominant (median) intensity.

    A per-pixel reference built from frames that already contain the targets
    hides stationary targets from the subtraction; against a mostly uniform
    backdrop the dominant intensity is the backdrop itself.
    """
    level = int(np.floor(np.median(model.reference.pixels) + 0.5))
    ref = model.reference
    return BackgroundModel(
        GrayFrame(ref.width, ref.height, np.full((ref.height, ref.width), level, np.uint8))
    )


def subtract(gray: GrayFrame, model: BackgroundModel, threshold: int) -> np.ndarray:
    """Boolean foreground mask: absolute difference at or above the threshold."""
    if not 1 <= threshold <= 255:
        raise ValueError(f"threshold must lie in [1, 255], got {threshold}")
    ref = model.reference
    if gray.width != ref.width or gray.height != ref.height:
        raise ValueError("frame and background dimensions differ")
    diff = np.abs(gray.pixels.astype(np.int16) - ref.pixels.astype(np.int16))
    return diff >= threshold


def dilate(mask: np.ndarray) -> np.ndarray:
    """One 8-neighborhood dilation step; bridges 1-px gaps in broken components."""
    h, w = mask.shape
    padded = np.pad(mask, 1)
    out = mask.copy()
    for dy, dx in _NEIGHBORS:
        out |= padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
    return out


def connected_components(mask: np.ndarray, min_area: int = 20) -> list[Detection]:
    """8-connected foreground components as tight-rect detections.

    Components smaller than min_area are dropped; the result is sorted by
    descending area (ties by top-left corner) so the most prominent target
    comes first.
    """
    if mask.ndim != 2 or mask.dtype != np.bool_:
        raise ValueError("mask must be a 2-d boolean array")
    if min_area < 1:
        raise ValueError(f"min_area must be >= 1, got {min_area}")
    h, w = mask.shape
    visited = np.zeros_like(mask)
    detections = []
    for y0, x0 in np.argwhere(mask):
        if visited[y0, x0]:
            continue
        visited[y0, x0] = True
        queue = deque([(int(y0), int(x0))])
        min_x = max_x = int(x0)
        min_y = max_y = int(y0)
        area = 0
        while queue:
            y, x = queue.popleft()
            area += 1
            min_x, max_x = min(min_x, x), max(max_x, x)
            min_y, max_y = min(min_y, y), max(max_y, y)
            for dy, dx in _NEIGHBORS:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not visited[ny, nx]:
                    visited[ny, nx] = True
                    queue.append((ny, nx))
        if area >= min_area:
            rect = Rect(
                (min_x + max_x) / 2.0,
                (min_y + max_y) / 2.0,
                max_x - min_x + 1,
                max_y - min_y + 1,
            )
            detections.append((area, min_y, min_x, rect))
    detections.sort(key=lambda item: (-item[0], item[1], item[2]))
    return [Detection(rect, area) for area, _, _, rect in detections]


def detect(
    gray: GrayFrame,
    model: BackgroundModel,
    threshold: int = 30,
    min_area: int = 20,
    dilate_mask: bool = False,
) -> list[Detection]:
    """Full pipeline: subtract, optional dilation, component extraction."""
    mask = subtract(gray, model, threshold)
    if dilate_mask:
        mask = dilate(mask)
    return connected_components(mask, min_area)
