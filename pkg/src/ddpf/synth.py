"""Deterministic synthetic scenes with exact per-frame ground truth.

Targets are patterned rectangles moving along piecewise-linear waypoint paths;
their size and in-plane rotation follow per-frame schedules. Rotation and
scaling deform the axis-aligned appearance of a target, which is exactly what
the tracker's model-replacement machinery is meant to absorb. Truth records
the tight bounding box of what was actually rasterized, never the schedule's
idealized values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterator, Mapping, Sequence

import numpy as np

from .errors import ScenarioError
from .imaging import Frame, iround
from .particle_filter import RandomSource

Color = tuple[int, int, int]

BUILTIN_SCENARIOS = (
    "static",
    "maneuver-scale",
    "maneuver-rotate",
    "crossing-two",
    "occlusion-full",
)


@dataclass(frozen=True)
class FillPattern:
    """Solid color, or a two-tone core with a fixed-width secondary border.

    A fixed border width means scaling shifts the tone proportions, and for a
    rotated target the border plus exposed backdrop shift them too, so the
    color-histogram drift the tracker watches for actually materializes.
    """

    kind: str = "solid"
    primary: Color = (210, 60, 50)
    secondary: Color | None = None
    border: int = 2

    def __post_init__(self) -> None:
        if self.kind not in ("solid", "two-tone"):
            raise ScenarioError(f"fill kind must be solid or two-tone, got {self.kind!r}")
        if self.kind == "two-tone" and self.secondary is None:
            raise ScenarioError("two-tone fill requires a secondary color")
        if self.kind == "two-tone" and self.border < 1:
            raise ScenarioError(f"border width must be >= 1, got {self.border}")
        for color in (self.primary, self.secondary or (0, 0, 0)):
            if len(color) != 3 or any(not 0 <= c <= 255 for c in color):
                raise ScenarioError(f"colors must be RGB triples in [0, 255], got {color!r}")


@dataclass(frozen=True)
class TargetSpec:
    """One target: fill, waypoint path, size schedule, rotation schedule.

    Every schedule is a tuple of (frame, values...) knots, linearly
    interpolated and clamped outside the knot range.
    """

    fill: FillPattern
    waypoints: tuple[tuple[int, float, float], ...]
    dims: tuple[tuple[int, int, int], ...]
    rotation: tuple[tuple[int, float], ...] = ((0, 0.0),)

    def __post_init__(self) -> None:
        for name, knots in (
            ("waypoints", self.waypoints),
            ("dims", self.dims),
            ("rotation", self.rotation),
        ):
            if not knots:
                raise ScenarioError(f"target {name} must hold at least one knot")
            frames = [k[0] for k in knots]
            if any(b <= a for a, b in zip(frames, frames[1:])):
                raise ScenarioError(f"target {name} knot frames must strictly increase")
        if any(hx < 1 or hy < 1 for _, hx, hy in self.dims):
            raise ScenarioError("target dims must be >= 1")


@dataclass(frozen=True)
class Occluder:
    """Static scenery rectangle painted over every target, absent from truth.

    Targets passing underneath lose visibility without any extra truth rows,
    which is how a full-occlusion scene keeps a single tracked target.
    """

    cx: float
    cy: float
    hx: int
    hy: int
    color: Color

    def __post_init__(self) -> None:
        if self.hx < 1 or self.hy < 1:
            raise ScenarioError("occluder dims must be >= 1")
        if len(self.color) != 3 or any(not 0 <= c <= 255 for c in self.color):
            raise ScenarioError(f"occluder color must be an RGB triple, got {self.color!r}")


@dataclass(frozen=True)
class SceneSpec:
    width: int = 320
    height: int = 240
    background: Color = (40, 40, 40)
    frames: int = 100
    noise_std: float = 0.0
    seed: int = 0
    targets: tuple[TargetSpec, ...] = ()
    occluders: tuple[Occluder, ...] = ()

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ScenarioError("scene dimensions must be >= 1")
        if self.frames < 1:
            raise ScenarioError("scene must span at least one frame")
        if self.noise_std < 0:
            raise ScenarioError("noise_std must be >= 0")
        if len(self.background) != 3 or any(not 0 <= c <= 255 for c in self.background):
            raise ScenarioError(f"background must be an RGB triple, got {self.background!r}")


@dataclass
class GroundTruth:
    """Rendered geometry per frame per target.

    centers/dims hold the tight box of each target's own pixels; visibility is
    the fraction of those pixels still on top (and inside the frame) after all
    targets were painted.
    """

    centers: np.ndarray  # (frames, targets, 2) float64
    dims: np.ndarray  # (frames, targets, 2) int
    visibility: np.ndarray  # (frames, targets) float64

    @property
    def frames(self) -> int:
        return self.centers.shape[0]

    @property
    def num_targets(self) -> int:
        return self.centers.shape[1]

    def rows(self) -> Iterator[tuple[int, int, float, float, int, int, float]]:
        """Rows (frame, target_id, x, y, hx, hy, visible) in frame-major order."""
        for f in range(self.frames):
            for t in range(self.num_targets):
                x, y = self.centers[f, t]
                hx, hy = self.dims[f, t]
                yield f, t, float(x), float(y), int(hx), int(hy), float(self.visibility[f, t])


def _interp(knots: Sequence[tuple], frame: int) -> tuple[float, ...]:
    xs = np.array([k[0] for k in knots], dtype=np.float64)
    return tuple(
        float(np.interp(frame, xs, np.array([k[i] for k in knots], dtype=np.float64)))
        for i in range(1, len(knots[0]))
    )


def _rasterize(
    spec: TargetSpec, cx: float, cy: float, hx: int, hy: int, theta_deg: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integer pixel coordinates (ys, xs) of the rotated rect and their colors.

    The unrotated footprint reproduces rect membership exactly: columns
    iround(cx) - hx//2 .. iround(cx) + hx - 1 - hx//2, and likewise for rows.
    """
    # Continuous center of the pixel footprint (half-pixel shift for even sides).
    ax = iround(cx) - (0.5 if hx % 2 == 0 else 0.0)
    ay = iround(cy) - (0.5 if hy % 2 == 0 else 0.0)
    theta = math.radians(theta_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    ex = (hx * abs(cos_t) + hy * abs(sin_t)) / 2.0 + 1.0
    ey = (hx * abs(sin_t) + hy * abs(cos_t)) / 2.0 + 1.0
    gx = np.arange(math.floor(ax - ex), math.ceil(ax + ex) + 1)
    gy = np.arange(math.floor(ay - ey), math.ceil(ay + ey) + 1)
    px = gx[None, :] - ax
    py = gy[:, None] - ay
    qx = cos_t * px + sin_t * py
    qy = -sin_t * px + cos_t * py
    inside = (np.abs(qx) < hx / 2.0) & (np.abs(qy) < hy / 2.0)
    ys, xs = np.nonzero(inside)
    colors = np.empty((len(ys), 3), dtype=np.uint8)
    colors[:] = spec.fill.primary
    if spec.fill.kind == "two-tone":
        depth = np.minimum(hx / 2.0 - np.abs(qx[inside]), hy / 2.0 - np.abs(qy[inside]))
        colors[depth < spec.fill.border] = spec.fill.secondary
    return gy[ys], gx[xs], colors


def render(spec: SceneSpec) -> tuple[list[Frame], GroundTruth]:
    """Rasterize every frame and collect exact ground truth.

    Identical scene descriptions render identical bytes: the only randomness
    is pixel noise drawn from a stream seeded by ``spec.seed``.
    """
    rng = RandomSource(spec.seed)
    n_targets = len(spec.targets)
    centers = np.zeros((spec.frames, n_targets, 2))
    dims = np.zeros((spec.frames, n_targets, 2), dtype=int)
    visibility = np.zeros((spec.frames, n_targets))
    frames: list[Frame] = []
    for f in range(spec.frames):
        canvas = np.empty((spec.height, spec.width, 3), dtype=np.uint8)
        canvas[:] = np.asarray(spec.background, dtype=np.uint8)
        owner = np.full((spec.height, spec.width), -1, dtype=int)
        rasters = []
        for t, target in enumerate(spec.targets):
            cx, cy = _interp(target.waypoints, f)
            hx_f, hy_f = _interp(target.dims, f)
            hx, hy = max(1, iround(hx_f)), max(1, iround(hy_f))
            (theta,) = _interp(target.rotation, f)
            ys, xs, colors = _rasterize(target, cx, cy, hx, hy, theta)
            keep = (ys >= 0) & (ys < spec.height) & (xs >= 0) & (xs < spec.width)
            kys, kxs = ys[keep], xs[keep]
            canvas[kys, kxs] = colors[keep]
            owner[kys, kxs] = t
            rasters.append((len(ys), kys, kxs))
            if len(kys):
                min_x, max_x = int(kxs.min()), int(kxs.max())
                min_y, max_y = int(kys.min()), int(kys.max())
                centers[f, t] = ((min_x + max_x) / 2.0, (min_y + max_y) / 2.0)
                dims[f, t] = (max_x - min_x + 1, max_y - min_y + 1)
            else:
                centers[f, t] = (cx, cy)
                dims[f, t] = (hx, hy)
        for occ in spec.occluders:
            x0 = iround(occ.cx) - occ.hx // 2
            y0 = iround(occ.cy) - occ.hy // 2
            sl = (
                slice(max(0, y0), max(0, min(spec.height, y0 + occ.hy))),
                slice(max(0, x0), max(0, min(spec.width, x0 + occ.hx))),
            )
            canvas[sl] = np.asarray(occ.color, dtype=np.uint8)
            owner[sl] = -1
        for t, (total, kys, kxs) in enumerate(rasters):
            if total:
                visibility[f, t] = float(np.count_nonzero(owner[kys, kxs] == t)) / total
        if spec.noise_std > 0:
            noisy = canvas.astype(np.float64) + rng.normal(canvas.shape) * spec.noise_std
            canvas = np.clip(np.floor(noisy + 0.5), 0, 255).astype(np.uint8)
        frames.append(Frame(spec.width, spec.height, canvas))
    return frames, GroundTruth(centers, dims, visibility)


_BRIGHT: Color = (240, 220, 200)  # luma 224 against the backdrop's 40
_SKY: Color = (100, 200, 255)  # luma 176, distinct chroma bin from _BRIGHT
_AMBER: Color = (250, 190, 40)  # luma 191
_CYAN: Color = (60, 190, 255)  # luma 158
_STONE: Color = (70, 65, 55)  # luma 65: visible, but under the detector's threshold
_BACKDROP: Color = (40, 40, 40)


def builtin_scenario(name: str) -> SceneSpec:
    """One of the five named scene descriptions, fully parameterized.

    Speeds stay near 0.5 px/frame: with the default likelihood sharpness a
    fresh appearance model follows roughly 0.7 px/frame, while a badly stale
    one manages far less — which is the contrast the maneuver scenes exist to
    show.
    """
    if name == "static":
        return SceneSpec(
            frames=100,
            background=_BACKDROP,
            targets=(
                TargetSpec(
                    fill=FillPattern("solid", _BRIGHT),
                    waypoints=((0, 160.0, 120.0),),
                    dims=((0, 16, 16),),
                ),
            ),
        )
    if name == "maneuver-scale":
        # Abrupt shrink to a flat sliver: a tracker that never replaces its
        # model keeps weighing a 40x40 patch that is now mostly backdrop.
        return SceneSpec(
            frames=150,
            background=_BACKDROP,
            targets=(
                TargetSpec(
                    fill=FillPattern("two-tone", _BRIGHT, _SKY, border=2),
                    waypoints=((0, 60.0, 56.0), (30, 76.0, 67.0), (149, 125.3, 100.3)),
                    dims=((0, 40, 40), (20, 40, 40), (30, 20, 12), (149, 20, 12)),
                ),
            ),
        )
    if name == "maneuver-rotate":
        # Quarter turn between frames 50 and 100 while moving; the swelling
        # bounding box mixes backdrop into the truth-rect histogram.
        return SceneSpec(
            frames=150,
            background=_BACKDROP,
            targets=(
                TargetSpec(
                    fill=FillPattern("two-tone", _BRIGHT, _SKY, border=2),
                    waypoints=((0, 80.0, 70.0), (149, 135.0, 117.0)),
                    dims=((0, 16, 16),),
                    rotation=((0, 0.0), (50, 0.0), (100, 90.0), (149, 90.0)),
                ),
            ),
        )
    if name == "crossing-two":
        # Opposite-moving targets 14 px apart vertically: their blobs merge
        # for ~30 frames around the pass, but each keeps an unoccluded edge.
        return SceneSpec(
            frames=150,
            background=_BACKDROP,
            targets=(
                TargetSpec(
                    fill=FillPattern("solid", _CYAN),
                    waypoints=((0, 135.0, 107.0), (149, 60.0, 107.0)),
                    dims=((0, 16, 16),),
                ),
                TargetSpec(
                    fill=FillPattern("solid", _AMBER),
                    waypoints=((0, 55.0, 93.0), (149, 130.0, 93.0)),
                    dims=((0, 16, 16),),
                ),
            ),
        )
    if name == "occlusion-full":
        # One target slides behind a static block that the detector cannot
        # see (its luma sits under the background-subtraction threshold).
        return SceneSpec(
            frames=150,
            background=_BACKDROP,
            targets=(
                TargetSpec(
                    fill=FillPattern("solid", _BRIGHT),
                    waypoints=((0, 50.0, 120.0), (149, 125.0, 120.0)),
                    dims=((0, 16, 16),),
                ),
            ),
            occluders=(Occluder(100.0, 120.0, 20, 60, _STONE),),
        )
    raise ScenarioError(
        f"unknown scenario {name!r}; valid names: {', '.join(BUILTIN_SCENARIOS)}"
    )


def _color_from(value: Any, context: str) -> Color:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 3
        or any(isinstance(c, bool) or not isinstance(c, int) for c in value)
    ):
        raise ScenarioError(f"{context} must be an RGB triple of integers, got {value!r}")
    return (value[0], value[1], value[2])


def _knots_from(value: Any, context: str, arity: int) -> tuple[tuple, ...]:
    if not isinstance(value, (list, tuple)) or not value:
        raise ScenarioError(f"{context} must be a non-empty list of knots")
    knots = []
    for knot in value:
        if not isinstance(knot, (list, tuple)) or len(knot) != arity:
            raise ScenarioError(f"{context} knots must have {arity} entries, got {knot!r}")
        if isinstance(knot[0], bool) or not isinstance(knot[0], int):
            raise ScenarioError(f"{context} knot frames must be integers, got {knot[0]!r}")
        for v in knot[1:]:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ScenarioError(f"{context} knot values must be numbers, got {v!r}")
        knots.append(tuple(knot))
    return tuple(knots)


def scene_spec_from_dict(document: Mapping[str, Any]) -> SceneSpec:
    """Parse a scene description document; unknown keys are rejected."""
    allowed = {
        "width",
        "height",
        "background",
        "frames",
        "noise_std",
        "seed",
        "targets",
        "occluders",
    }
    unknown = set(document) - allowed
    if unknown:
        raise ScenarioError(f"unknown scene keys: {', '.join(sorted(unknown))}")
    kwargs: dict[str, Any] = {}
    for key in ("width", "height", "frames", "seed"):
        if key in document:
            value = document[key]
            if isinstance(value, bool) or not isinstance(value, int):
                raise ScenarioError(f"scene key {key!r} must be an integer, got {value!r}")
            kwargs[key] = value
    if "noise_std" in document:
        value = document["noise_std"]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"noise_std must be a number, got {value!r}")
        kwargs["noise_std"] = float(value)
    if "background" in document:
        kwargs["background"] = _color_from(document["background"], "background")
    targets = []
    for i, entry in enumerate(document.get("targets", [])):
        if not isinstance(entry, Mapping):
            raise ScenarioError(f"target {i} must be an object")
        extra = set(entry) - {"fill", "waypoints", "dims", "rotation"}
        if extra:
            raise ScenarioError(f"target {i} has unknown keys: {', '.join(sorted(extra))}")
        fill_doc = entry.get("fill", {})
        if not isinstance(fill_doc, Mapping):
            raise ScenarioError(f"target {i} fill must be an object")
        fill_extra = set(fill_doc) - {"kind", "primary", "secondary", "border"}
        if fill_extra:
            raise ScenarioError(
                f"target {i} fill has unknown keys: {', '.join(sorted(fill_extra))}"
            )
        fill = FillPattern(
            kind=fill_doc.get("kind", "solid"),
            primary=_color_from(fill_doc.get("primary", _BRIGHT), f"target {i} primary"),
            secondary=(
                _color_from(fill_doc["secondary"], f"target {i} secondary")
                if "secondary" in fill_doc
                else None
            ),
            border=fill_doc.get("border", 2),
        )
        if "waypoints" not in entry or "dims" not in entry:
            raise ScenarioError(f"target {i} requires waypoints and dims")
        dims_knots = _knots_from(entry["dims"], f"target {i} dims", 3)
        if any(not isinstance(v, int) for knot in dims_knots for v in knot[1:]):
            raise ScenarioError(f"target {i} dims must be integers")
        targets.append(
            TargetSpec(
                fill=fill,
                waypoints=_knots_from(entry["waypoints"], f"target {i} waypoints", 3),
                dims=dims_knots,
                rotation=(
                    _knots_from(entry["rotation"], f"target {i} rotation", 2)
                    if "rotation" in entry
                    else ((0, 0.0),)
                ),
            )
        )
    kwargs["targets"] = tuple(targets)
    occluders = []
    for i, entry in enumerate(document.get("occluders", [])):
        if not isinstance(entry, Mapping):
            raise ScenarioError(f"occluder {i} must be an object")
        extra = set(entry) - {"cx", "cy", "hx", "hy", "color"}
        if extra:
            raise ScenarioError(f"occluder {i} has unknown keys: {', '.join(sorted(extra))}")
        for key in ("cx", "cy", "hx", "hy", "color"):
            if key not in entry:
                raise ScenarioError(f"occluder {i} requires {key}")
        for key in ("cx", "cy"):
            if isinstance(entry[key], bool) or not isinstance(entry[key], (int, float)):
                raise ScenarioError(f"occluder {i} {key} must be a number, got {entry[key]!r}")
        for key in ("hx", "hy"):
            if isinstance(entry[key], bool) or not isinstance(entry[key], int):
                raise ScenarioError(f"occluder {i} {key} must be an integer, got {entry[key]!r}")
        occluders.append(
            Occluder(
                cx=float(entry["cx"]),
                cy=float(entry["cy"]),
                hx=entry["hx"],
                hy=entry["hy"],
                color=_color_from(entry["color"], f"occluder {i} color"),
            )
        )
    kwargs["occluders"] = tuple(occluders)
    return SceneSpec(**kwargs)
