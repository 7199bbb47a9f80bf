"""Multi-target visual tracking with deformation-aware particle filters.

Each target is followed by an independent particle filter whose observation
model combines grayscale patch agreement with kernel-weighted color-histogram
similarity. On a fixed schedule the tracker re-detects the scene and replaces
any appearance model that has drifted, so rotating, scaling, or recolored
targets keep their filters fed with a current reference.
"""

from .association import Assignment, gnn_associate, munkres
from .config import RunConfig
from .detection import (
    BackgroundModel,
    Detection,
    build_background,
    connected_components,
    detect,
    subtract,
    uniform_fill,
)
from .errors import (
    ConfigError,
    DecodeError,
    DegeneracyError,
    EvalError,
    InitializationError,
    ScenarioError,
    TrackingError,
)
from .histogram import (
    bhattacharyya_coeff,
    bhattacharyya_dist,
    bin_index,
    compute_histogram,
    epanechnikov,
)
from .imaging import (
    Frame,
    GrayFrame,
    Rect,
    decode_pgm,
    decode_ppm,
    draw_overlay,
    encode_pgm,
    encode_ppm,
    extract_patch,
    load_sequence,
    to_gray,
)
from .likelihood import (
    LikelihoodParams,
    color_likelihood,
    combined_likelihood,
    intensity_likelihood,
)
from .metrics import EvalReport, TrackEval, evaluate, per_frame_errors
from .particle_filter import (
    DynamicsConfig,
    ParticleSet,
    RandomSource,
    estimate,
    init_particles,
    predict,
    resample_multinomial,
    resample_systematic,
    reweight,
)
from .synth import (
    BUILTIN_SCENARIOS,
    FillPattern,
    GroundTruth,
    Occluder,
    SceneSpec,
    TargetSpec,
    builtin_scenario,
    render,
    scene_spec_from_dict,
)
from .tracker import TargetModel, Track, Tracker, TrackingResult, run

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BUILTIN_SCENARIOS",
    "BackgroundModel",
    "ConfigError",
    "DecodeError",
    "DegeneracyError",
    "Detection",
    "DynamicsConfig",
    "EvalError",
    "EvalReport",
    "FillPattern",
    "Frame",
    "GrayFrame",
    "GroundTruth",
    "InitializationError",
    "LikelihoodParams",
    "Occluder",
    "ParticleSet",
    "RandomSource",
    "Rect",
    "RunConfig",
    "SceneSpec",
    "ScenarioError",
    "TargetModel",
    "TargetSpec",
    "Track",
    "TrackEval",
    "Tracker",
    "TrackingError",
    "TrackingResult",
    "bhattacharyya_coeff",
    "bhattacharyya_dist",
    "bin_index",
    "build_background",
    "builtin_scenario",
    "color_likelihood",
    "combined_likelihood",
    "compute_histogram",
    "connected_components",
    "decode_pgm",
    "decode_ppm",
    "detect",
    "draw_overlay",
    "encode_pgm",
    "encode_ppm",
    "epanechnikov",
    "estimate",
    "evaluate",
    "extract_patch",
    "gnn_associate",
    "init_particles",
    "intensity_likelihood",
    "load_sequence",
    "munkres",
    "per_frame_errors",
    "predict",
    "render",
    "resample_multinomial",
    "resample_systematic",
    "reweight",
    "run",
    "scene_spec_from_dict",
    "subtract",
    "to_gray",
    "uniform_fill",
    "__version__",
]
