"""Pipeline configuration: session inputs, provider settings, tunables."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

from . import gesture
from .errors import SchemaError
from .llm_client import ProviderConfig


@dataclass
class Tunables:
    smoothing_window: int = gesture.SMOOTHING_WINDOW
    prominence_fraction: float = gesture.PROMINENCE_FRACTION
    pairing_tolerance_s: float = gesture.PAIRING_TOLERANCE_S
    crossing_sustain_s: float = gesture.CROSSING_SUSTAIN_S
    overlap_sustain_s: float = gesture.OVERLAP_SUSTAIN_S
    overlap_shoulder_fraction: float = gesture.OVERLAP_SHOULDER_FRACTION
    frequency_floor: float = gesture.FREQUENCY_FLOOR
    upright_max_deg: float = gesture.UPRIGHT_MAX_DEG
    gap_warning_s: float = 0.5

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value <= 0:
                raise SchemaError(f"tunable '{name}' must be positive, got {value}")


@dataclass
class SessionInputs:
    session_id: str
    audio: str
    transcript: str
    landmarks: str


@dataclass
class PipelineConfig:
    sessions: list = field(default_factory=list)  # of SessionInputs
    human_scores: str = ""
    output_dir: str = "out"
    providers: list = field(default_factory=lambda: [ProviderConfig()])
    rubric_catalog: str = ""  # optional override path
    weighting: str = "quadratic"
    jobs: int = 1
    tunables: Tunables = field(default_factory=Tunables)


def load_config(path) -> PipelineConfig:
    """Read the JSON config file mirroring PipelineConfig."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read config {path}: {e}") from e
    if not isinstance(raw, dict):
        raise SchemaError("config must be a JSON object")
    try:
        sessions = [SessionInputs(**s) for s in raw.get("sessions", [])]
        providers = [ProviderConfig(**p) for p in raw.get("providers", [{}])]
        tunables = Tunables(**raw.get("tunables", {}))
    except TypeError as e:
        raise SchemaError(f"config field error: {e}") from e
    weighting = raw.get("weighting", "quadratic")
    if weighting not in ("linear", "quadratic"):
        raise SchemaError(f"weighting must be linear or quadratic, got '{weighting}'")
    return PipelineConfig(
        sessions=sessions,
        human_scores=raw.get("human_scores", ""),
        output_dir=raw.get("output_dir", "out"),
        providers=providers,
        rubric_catalog=raw.get("rubric_catalog", ""),
        weighting=weighting,
        jobs=int(raw.get("jobs", 1)),
        tunables=tunables,
    )
