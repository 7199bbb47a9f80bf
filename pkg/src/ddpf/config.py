"""Run configuration: defaults, JSON round-trip, validation."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError
from .histogram import MAX_LEVELS, MIN_LEVELS
from .likelihood import LikelihoodParams
from .particle_filter import DynamicsConfig

# Dataclass fields whose JSON key differs ("lambda" is reserved in Python).
_JSON_NAMES = {"color_lambda": "lambda"}
_FIELD_NAMES = {v: k for k, v in _JSON_NAMES.items()}


@dataclass
class RunConfig:
    """Every tunable of the tracking pipeline, in one flat document."""

    num_particles: int = 100
    sigma_x: float = 5.0
    sigma_y: float = 5.0
    init_spread: float = 3.0
    resampler: str = "systematic"
    seed: int = 0
    color_lambda: float = 25.0
    intensity_scale: float = 255.0
    hist_levels: int = 4
    deform_period: int = 5
    deform_threshold: float = 0.12
    deformation_enabled: bool = True
    gate_px: float = 40.0
    bg_frames: int = 1
    bg_threshold: int = 30
    min_area: int = 20
    dilate: bool = False
    expected_targets: int = 1

    def validate(self) -> None:
        checks = [
            (self.num_particles >= 1, "num_particles must be >= 1"),
            (self.sigma_x > 0, "sigma_x must be > 0"),
            (self.sigma_y > 0, "sigma_y must be > 0"),
            (self.init_spread >= 0, "init_spread must be >= 0"),
            (
                self.resampler in ("systematic", "multinomial"),
                "resampler must be 'systematic' or 'multinomial'",
            ),
            (self.color_lambda > 0, "lambda must be > 0"),
            (self.intensity_scale > 0, "intensity_scale must be > 0"),
            (
                MIN_LEVELS <= self.hist_levels <= MAX_LEVELS,
                f"hist_levels must lie in [{MIN_LEVELS}, {MAX_LEVELS}]",
            ),
            (self.deform_period >= 1, "deform_period must be >= 1"),
            (
                0 < self.deform_threshold < 1,
                "deform_threshold must lie in (0, 1)",
            ),
            (self.gate_px > 0, "gate_px must be > 0"),
            (self.bg_frames >= 1, "bg_frames must be >= 1"),
            (1 <= self.bg_threshold <= 255, "bg_threshold must lie in [1, 255]"),
            (self.min_area >= 1, "min_area must be >= 1"),
            (self.expected_targets >= 1, "expected_targets must be >= 1"),
        ]
        bad = [message for ok, message in checks if not ok]
        if bad:
            raise ConfigError("; ".join(bad))

    def dynamics(self) -> DynamicsConfig:
        return DynamicsConfig(self.sigma_x, self.sigma_y)

    def likelihood_params(self) -> LikelihoodParams:
        return LikelihoodParams(self.color_lambda, self.intensity_scale)

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for field in dataclasses.fields(self):
            out[_JSON_NAMES.get(field.name, field.name)] = getattr(self, field.name)
        return out

    def replace(self, **updates: Any) -> "RunConfig":
        return dataclasses.replace(self, **updates)

    @classmethod
    def from_dict(cls, document: Mapping[str, Any]) -> "RunConfig":
        """Defaults overlaid with the document; unknown keys are rejected."""
        fields = {f.name: f for f in dataclasses.fields(cls)}
        values: dict[str, Any] = {}
        for key, raw in document.items():
            name = _FIELD_NAMES.get(key, key)
            if name not in fields:
                raise ConfigError(f"unknown config key {key!r}")
            values[name] = _coerce(key, raw, fields[name].type)
        config = cls(**values)
        config.validate()
        return config

    @classmethod
    def load(cls, path: Path | str) -> "RunConfig":
        try:
            document = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(document, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(document)


def _coerce(key: str, value: Any, annotation: str | type) -> Any:
    kind = annotation if isinstance(annotation, str) else annotation.__name__
    if kind == "bool":
        if isinstance(value, bool):
            return value
        raise ConfigError(f"config key {key!r} must be a boolean, got {value!r}")
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"config key {key!r} must be an integer, got {value!r}")
        return value
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"config key {key!r} must be a number, got {value!r}")
        return float(value)
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"config key {key!r} must be a string, got {value!r}")
        return value
    raise ConfigError(f"config key {key!r} has unsupported type")
