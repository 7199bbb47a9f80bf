"""Single-target sampling-importance-resampling particle filter primitives.

State is position only; motion is a zero-mean Gaussian random walk, so the
transition prior doubles as the proposal and weights reduce to the observation
likelihood. A particle is one row of ParticleSet.positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegeneracyError

_NORM_TOL = 1e-9


@dataclass
class ParticleSet:
    """positions: (n, 2) float64 array; weights: (n,) nonnegative float64 array."""

    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        self.positions = np.asarray(self.positions, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.positions.ndim != 2 or self.positions.shape[1] != 2:
            raise ValueError(f"positions must be (n, 2), got {self.positions.shape}")
        n = self.positions.shape[0]
        if n < 1:
            raise ValueError("particle set must hold at least one particle")
        if self.weights.shape != (n,):
            raise ValueError(
                f"weights shape {self.weights.shape} does not match {n} particles"
            )
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("positions must be finite")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise ValueError("weights must be finite and nonnegative")

    def __len__(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class DynamicsConfig:
    """Per-axis standard deviations of the random-walk step."""

    sigma_x: float = 5.0
    sigma_y: float = 5.0

    def __post_init__(self) -> None:
        if not (self.sigma_x > 0 and self.sigma_y > 0):
            raise ValueError(
                f"sigmas must be > 0, got ({self.sigma_x}, {self.sigma_y})"
            )


class RandomSource:
    """Seeded deterministic stream of uniform and standard-normal draws.

    Distinct stream ids under the same seed yield independent, reproducible
    sequences; tracks use their id as the stream so multi-target runs stay
    bit-stable regardless of processing order.
    """

    def __init__(self, seed: int, stream: int = 0):
        self.seed = seed
        self.stream = stream
        self._rng = np.random.default_rng(
            np.random.SeedSequence(seed, spawn_key=(stream,))
        )

    def uniform(self, size: int | tuple[int, ...] | None = None):
        return self._rng.random(size)

    def normal(self, size: int | tuple[int, ...] | None = None):
        return self._rng.standard_normal(size)


def init_particles(
    center: Sequence[float], n: int, spread: float, rng: RandomSource
) -> ParticleSet:
    """Gaussian cloud of n equally weighted particles around the center."""
    if n < 1:
        raise ValueError(f"particle count must be >= 1, got {n}")
    if spread < 0:
        raise ValueError(f"spread must be >= 0, got {spread}")
    positions = np.asarray(center, dtype=np.float64) + rng.normal((n, 2)) * spread
    return ParticleSet(positions, np.full(n, 1.0 / n))


def predict(pset: ParticleSet, dynamics: DynamicsConfig, rng: RandomSource) -> ParticleSet:
    """Displace every particle by an independent Gaussian step; weights carry over."""
    steps = rng.normal((len(pset), 2)) * np.array([dynamics.sigma_x, dynamics.sigma_y])
    return ParticleSet(pset.positions + steps, pset.weights.copy())


def reweight(
    pset: ParticleSet,
    weight_fn: Callable[[tuple[float, float]], float] | Sequence[float] | np.ndarray,
) -> ParticleSet:
    """Replace weights with normalized evaluations of weight_fn per particle.

    weight_fn may be a callable over (x, y) or a precomputed array of raw
    weights. An all-zero total is a degenerate posterior and raises; the caller
    decides how to recover.
    """
    if callable(weight_fn):
        raw = np.array(
            [float(weight_fn((x, y))) for x, y in pset.positions], dtype=np.float64
        )
    else:
        raw = np.asarray(weight_fn, dtype=np.float64)
    if raw.shape != (len(pset),):
        raise ValueError(f"expected {len(pset)} weights, got shape {raw.shape}")
    if not np.all(np.isfinite(raw)) or np.any(raw < 0):
        raise ValueError("raw weights must be finite and nonnegative")
    total = float(raw.sum())
    if total <= 0.0:
        raise DegeneracyError("all particle weights are zero")
    return ParticleSet(pset.positions.copy(), raw / total)


def _check_normalized(weights: np.ndarray) -> None:
    if abs(float(weights.sum()) - 1.0) > _NORM_TOL:
        raise ValueError("weights must be normalized to unit sum")


def estimate(pset: ParticleSet) -> tuple[float, float]:
    """Weighted mean position of a normalized particle set."""
    _check_normalized(pset.weights)
    ex, ey = pset.weights @ pset.positions
    return float(ex), float(ey)


def _resample_at(pset: ParticleSet, points: np.ndarray) -> ParticleSet:
    cumulative = np.cumsum(pset.weights)
    idx = np.minimum(
        np.searchsorted(cumulative, points, side="right"), len(pset) - 1
    )
    n = len(pset)
    return ParticleSet(pset.positions[idx].copy(), np.full(n, 1.0 / n))


def resample_systematic(pset: ParticleSet, rng: RandomSource) -> ParticleSet:
    """Cumulative-weight inversion at n evenly strided points with one shared jitter.

    Expected copy count of particle i is n * w_i; a uniformly weighted set is
    reproduced exactly.
    """
    _check_normalized(pset.weights)
    n = len(pset)
    points = (float(rng.uniform()) + np.arange(n)) / n
    return _resample_at(pset, points)


def resample_multinomial(pset: ParticleSet, rng: RandomSource) -> ParticleSet:
    """Independent cumulative-weight inversion at n uniform points."""
    _check_normalized(pset.weights)
    return _resample_at(pset, rng.uniform(len(pset)))


def build_resampler(name: str) -> Callable[[ParticleSet, RandomSource], ParticleSet]:
    if name == "systematic":
        return resample_systematic
    if name == "multinomial":
        return resample_multinomial
    raise ValueError(f"unknown resampler {name!r}; expected systematic or multinomial")
