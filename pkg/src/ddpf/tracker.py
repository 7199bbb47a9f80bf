"""Multi-target tracking loop.

Each target owns an independent particle filter and an appearance model (color
histogram, patch, rect size). On scheduled frames the detector re-measures the
scene and any track whose freshly detected histogram has drifted beyond the
replacement threshold gets a new model, which is what keeps rotating, scaling,
or recolored targets from starving their filters. When the detector sees fewer
blobs than tracked targets the pass is skipped outright: a merged blob would
otherwise feed one target's appearance to another.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Sequence

import numpy as np

from .association import gnn_associate
from .config import RunConfig
from .detection import (
    BackgroundModel,
    Detection,
    build_background,
    detect,
    uniform_fill,
)
from .errors import InitializationError
from .histogram import bhattacharyya_dist, compute_histogram
from .imaging import Frame, GrayFrame, Rect, extract_patch, to_gray
from .likelihood import color_likelihood, combined_likelihood, intensity_likelihood
from .particle_filter import (
    ParticleSet,
    RandomSource,
    build_resampler,
    estimate,
    init_particles,
    predict,
    reweight,
)

# Below this total raw weight the posterior carries no information.
_DEGENERACY_EPS = 1e-300

STATUS_ACTIVE = "active"
STATUS_OCCLUDED = "occluded-coast"


@dataclass
class TargetModel:
    """Reference appearance: rect size, unit-mass color histogram, grayscale patch."""

    hx: int
    hy: int
    ref_histogram: np.ndarray
    ref_patch: np.ndarray


@dataclass
class Track:
    track_id: int
    model: TargetModel
    particles: ParticleSet
    rng: RandomSource
    estimate: tuple[float, float]
    history: list[tuple[float, float]] = field(default_factory=list)
    dims_history: list[tuple[int, int]] = field(default_factory=list)
    status: str = STATUS_ACTIVE


@dataclass
class TrackingResult:
    """Per-frame estimates and sizes for every track, plus the event log."""

    frames: int
    estimates: np.ndarray  # (tracks, frames, 2) float64
    dims: np.ndarray  # (tracks, frames, 2) int
    events: dict[str, list[dict[str, Any]]]
    config: RunConfig

    @property
    def num_tracks(self) -> int:
        return self.estimates.shape[0]

    def trajectory_rows(self) -> Iterator[tuple[int, int, float, float, int, int]]:
        """Rows (frame, track_id, x, y, hx, hy) in frame-major order."""
        for f in range(self.frames):
            for t in range(self.num_tracks):
                x, y = self.estimates[t, f]
                hx, hy = self.dims[t, f]
                yield f, t, float(x), float(y), int(hx), int(hy)


def _new_events() -> dict[str, list[dict[str, Any]]]:
    return {
        "model_updates": [],
        "occlusion_skips": [],
        "degeneracy_fallbacks": [],
        "deformation_checks": [],
    }


class Tracker:
    """Stateful driver: initialize on the head frame, then step frame by frame."""

    def __init__(self, config: RunConfig, record_histograms: bool = False):
        config.validate()
        self.config = config
        self.record_histograms = record_histograms
        self.tracks: list[Track] = []
        self.background: BackgroundModel | None = None
        self.events = _new_events()
        self.frames_processed = 0
        self._resample = build_resampler(config.resampler)

    def _detect(self, gray: GrayFrame) -> list[Detection]:
        assert self.background is not None
        return detect(
            gray,
            self.background,
            threshold=self.config.bg_threshold,
            min_area=self.config.min_area,
            dilate_mask=self.config.dilate,
        )

    def _build_model(self, frame: Frame, gray: GrayFrame, rect: Rect) -> TargetModel:
        hist = compute_histogram(frame, rect, self.config.hist_levels)
        return TargetModel(rect.hx, rect.hy, hist, extract_patch(gray, rect))

    def initialize(self, frames: Sequence[Frame]) -> list[Track]:
        """Build the background from the leading frames and spawn one track per target.

        Raises InitializationError unless the detector finds exactly
        expected_targets components on the first frame.
        """
        if not frames:
            raise ValueError("need at least one frame")
        cfg = self.config
        grays = [to_gray(f) for f in frames[: cfg.bg_frames]]
        self.background = uniform_fill(build_background(grays))
        detections = self._detect(grays[0])
        if len(detections) != cfg.expected_targets:
            raise InitializationError(len(detections), cfg.expected_targets)
        self.tracks = []
        for track_id, det in enumerate(detections):
            rng = RandomSource(cfg.seed, stream=track_id + 1)
            particles = init_particles(
                (det.rect.cx, det.rect.cy), cfg.num_particles, cfg.init_spread, rng
            )
            track = Track(
                track_id=track_id,
                model=self._build_model(frames[0], grays[0], det.rect),
                particles=particles,
                rng=rng,
                estimate=estimate(particles),
            )
            track.history.append(track.estimate)
            track.dims_history.append((track.model.hx, track.model.hy))
            self.tracks.append(track)
        self.frames_processed = 1
        return self.tracks

    def deformation_pass(
        self, frame_index: int, frame: Frame, gray: GrayFrame | None = None
    ) -> None:
        """Re-detect, associate, and replace drifted appearance models.

        Skipped entirely when fewer components than tracked targets are found:
        the merged or missing blobs mean at least one target is occluded.
        """
        cfg = self.config
        gray = gray if gray is not None else to_gray(frame)
        detections = self._detect(gray)
        if len(detections) < cfg.expected_targets:
            self.events["occlusion_skips"].append(
                {"frame": frame_index, "detections_found": len(detections)}
            )
            for track in self.tracks:
                track.status = STATUS_OCCLUDED
            return
        for track in self.tracks:
            track.status = STATUS_ACTIVE
        assignment = gnn_associate(
            [track.estimate for track in self.tracks], detections, cfg.gate_px
        )
        for track_index, det_index in assignment.pairs:
            track = self.tracks[track_index]
            rect = detections[det_index].rect
            candidate = compute_histogram(frame, rect, cfg.hist_levels)
            distance = bhattacharyya_dist(candidate, track.model.ref_histogram)
            self.events["deformation_checks"].append(
                {"frame": frame_index, "track_id": track.track_id, "distance": distance}
            )
            if distance > cfg.deform_threshold:
                track.model = TargetModel(
                    rect.hx, rect.hy, candidate, extract_patch(gray, rect)
                )
                update: dict[str, Any] = {
                    "frame": frame_index,
                    "track_id": track.track_id,
                    "distance": distance,
                    "hx": rect.hx,
                    "hy": rect.hy,
                }
                if self.record_histograms:
                    update["histogram"] = [float(v) for v in candidate]
                self.events["model_updates"].append(update)

    def _particle_weights(
        self, frame: Frame, gray: GrayFrame, track: Track, pset: ParticleSet
    ) -> np.ndarray:
        cfg = self.config
        params = cfg.likelihood_params()
        model = track.model
        weights = np.empty(len(pset))
        for i, (px, py) in enumerate(pset.positions):
            rect = Rect(float(px), float(py), model.hx, model.hy)
            p_int = intensity_likelihood(model.ref_patch, extract_patch(gray, rect), params)
            distance = bhattacharyya_dist(
                compute_histogram(frame, rect, cfg.hist_levels), model.ref_histogram
            )
            weights[i] = combined_likelihood(p_int, color_likelihood(distance, params))
        return weights

    def step(self, frame_index: int, frame: Frame) -> list[Track]:
        """Advance every track one frame: scheduled model refresh, then filter update."""
        cfg = self.config
        gray = to_gray(frame)
        if cfg.deformation_enabled and frame_index % cfg.deform_period == 0:
            self.deformation_pass(frame_index, frame, gray)
        for track in self.tracks:
            pset = predict(track.particles, cfg.dynamics(), track.rng)
            raw = self._particle_weights(frame, gray, track, pset)
            total = float(raw.sum())
            if not np.isfinite(total) or total <= _DEGENERACY_EPS:
                # No information this frame: hold the estimate, flatten the weights.
                pset = ParticleSet(pset.positions, np.full(len(pset), 1.0 / len(pset)))
                self.events["degeneracy_fallbacks"].append(
                    {"frame": frame_index, "track_id": track.track_id}
                )
            else:
                pset = reweight(pset, raw)
                track.estimate = estimate(pset)
            track.history.append(track.estimate)
            track.dims_history.append((track.model.hx, track.model.hy))
            track.particles = self._resample(pset, track.rng)
        self.frames_processed += 1
        return self.tracks

    def result(self) -> TrackingResult:
        frames = self.frames_processed
        n = len(self.tracks)
        estimates = np.zeros((n, frames, 2))
        dims = np.zeros((n, frames, 2), dtype=int)
        for t, track in enumerate(self.tracks):
            estimates[t] = np.asarray(track.history)
            dims[t] = np.asarray(track.dims_history)
        return TrackingResult(frames, estimates, dims, self.events, self.config)


def run(
    frames: Sequence[Frame],
    config: RunConfig,
    record_histograms: bool = False,
    progress: Callable[[int, int], None] | None = None,
) -> TrackingResult:
    """Track the whole sequence: initialize on the head frame, step the rest."""
    tracker = Tracker(config, record_histograms=record_histograms)
    tracker.initialize(frames)
    if progress is not None:
        progress(1, len(frames))
    for index in range(1, len(frames)):
        tracker.step(index, frames[index])
        if progress is not None:
            progress(index + 1, len(frames))
    return tracker.result()
