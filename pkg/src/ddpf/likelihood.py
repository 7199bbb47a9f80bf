"""Observation likelihoods combining grayscale agreement and color similarity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LikelihoodParams:
    """Weights of the two likelihood terms.

    color_lambda sharpens the color term (exposed as "lambda" in run configs);
    intensity_scale divides the mean absolute grayscale difference.
    """

    color_lambda: float = 25.0
    intensity_scale: float = 255.0

    def __post_init__(self) -> None:
        if not self.color_lambda > 0:
            raise ValueError(f"color_lambda must be > 0, got {self.color_lambda}")
        if not self.intensity_scale > 0:
            raise ValueError(
                f"intensity_scale must be > 0, got {self.intensity_scale}"
            )


def intensity_likelihood(
    ref_patch: np.ndarray,
    cand_patch: np.ndarray,
    params: LikelihoodParams = LikelihoodParams(),
) -> float:
    """exp of the negative scaled sum of absolute grayscale differences.

    Identical patches score exactly 1; the score decays with the mean absolute
    difference divided by intensity_scale. Shapes must match.
    """
    if ref_patch.shape != cand_patch.shape:
        raise ValueError(
            f"patch shapes differ: {ref_patch.shape} vs {cand_patch.shape}"
        )
    diff = np.abs(ref_patch.astype(np.int64) - cand_patch.astype(np.int64))
    return math.exp(-float(diff.sum()) / (params.intensity_scale * ref_patch.size))


def color_likelihood(
    distance: float, params: LikelihoodParams = LikelihoodParams()
) -> float:
    """exp(-lambda * d**2) for a Bhattacharyya distance d."""
    if not 0.0 <= distance <= 1.0:
        raise ValueError(f"distance must lie in [0, 1], got {distance}")
    return math.exp(-params.color_lambda * distance * distance)


def combined_likelihood(p_intensity: float, p_color: float) -> float:
    """Particle weight: intensity term plus squared color term."""
    if p_intensity < 0 or p_color < 0:
        raise ValueError("likelihood terms must be nonnegative")
    return p_intensity + p_color * p_color
