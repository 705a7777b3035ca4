"""Rubric catalog, cue definitions, modality routing, and prompt construction.

The 12 criteria and their 0-4 level descriptors live in a versioned JSON data
file (overridable from the CLI) rather than code constants. Each criterion
declares which record fields its prompt may see: text only, text + vocal,
text + nonverbal, or everything.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from .errors import CatalogCorrupt, ModalityMismatch
from .segmenter import SegmentRecord, format_time

MODALITIES = ("text_only", "text_vocal", "text_nonverbal", "full")

_EXPECTED_MODALITY = {**{i: "text_only" for i in range(1, 9)},
                      9: "text_vocal", 10: "text_nonverbal",
                      11: "full", 12: "full"}

_VOCAL_KEYS = ("pitch", "loudness", "speech_rate", "intonation_pattern")
_NONVERBAL_KEYS = ("posture", "pose", "face_expression",
                   "horizontal_gesture", "vertical_gesture", "hand_configuration")

MODALITY_KEYS = {
    "text_only": ("transcript",),
    "text_vocal": ("transcript",) + _VOCAL_KEYS,
    "text_nonverbal": ("transcript",) + _NONVERBAL_KEYS,
    "full": ("transcript", "posture", "pose", "pitch", "loudness", "speech_rate",
             "intonation_pattern", "face_expression", "horizontal_gesture",
             "vertical_gesture", "hand_configuration"),
}

_LEVEL_NAMES = {4: "Advanced", 3: "Proficient", 2: "Basic", 1: "Minimal", 0: "Deficient"}


@dataclass(frozen=True)
class RubricSpec:
    id: int
    name: str
    modality: str
    levels: dict  # score -> descriptor


@dataclass
class CueDefinitions:
    entries: list  # of dicts with name/group/physiological_response/response_indicator

    def for_modality(self, modality: str) -> list:
        if modality == "text_only":
            return []
        if modality == "full":
            return list(self.entries)
        group = "vocal" if modality == "text_vocal" else "nonverbal"
        return [e for e in self.entries if e["group"] == group]


@dataclass
class PromptPayload:
    modality: str
    rich_data_text: str


def _read_data(name: str, override_path=None) -> object:
    if override_path is not None:
        with open(override_path, encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(resources.files("speakeval.data").joinpath(name).read_text(encoding="utf-8"))


def load_catalog(rubric_path=None, cues_path=None):
    """Load and validate the 12 rubric specs plus the cue definitions."""
    raw = _read_data("rubrics.json", rubric_path)
    if not isinstance(raw, list) or len(raw) != 12:
        raise CatalogCorrupt(f"expected 12 rubrics, got {len(raw) if isinstance(raw, list) else 'non-list'}")
    specs = []
    for entry in raw:
        try:
            rid = int(entry["id"])
            name = entry["name"]
            modality = entry["modality"]
            levels = {int(k): str(v) for k, v in entry["levels"].items()}
        except (KeyError, TypeError, ValueError) as e:
            raise CatalogCorrupt(f"malformed rubric entry: {e}") from e
        if sorted(levels) != [0, 1, 2, 3, 4]:
            raise CatalogCorrupt(f"rubric {rid}: needs exactly 5 level descriptors 0-4")
        if modality not in MODALITIES:
            raise CatalogCorrupt(f"rubric {rid}: unknown modality '{modality}'")
        if _EXPECTED_MODALITY.get(rid) != modality:
            raise CatalogCorrupt(f"rubric {rid}: modality must be {_EXPECTED_MODALITY.get(rid)}")
        specs.append(RubricSpec(id=rid, name=name, modality=modality, levels=levels))
    if sorted(s.id for s in specs) != list(range(1, 13)):
        raise CatalogCorrupt("rubric ids must cover 1..12")
    specs.sort(key=lambda s: s.id)

    cues_raw = _read_data("cues.json", cues_path)
    if not isinstance(cues_raw, list) or not cues_raw:
        raise CatalogCorrupt("cue definitions missing")
    return specs, CueDefinitions(entries=cues_raw)


def select_payload(records: Sequence[SegmentRecord], modality: str) -> PromptPayload:
    """Re-render the record blocks keeping only the fields the modality allows."""
    if modality not in MODALITY_KEYS:
        raise ModalityMismatch(f"unknown modality '{modality}'")
    allowed = MODALITY_KEYS[modality]
    blocks = []
    for r in records:
        filtered = {k: v for k, v in r.payload().items() if k in allowed}
        header = f'[{format_time(r.window.start_s)} - {format_time(r.window.end_s)} "secs"]: '
        blocks.append(header + json.dumps(filtered, indent=1, ensure_ascii=False))
    return PromptPayload(modality=modality, rich_data_text="\n\n".join(blocks))


def _render_levels(rubric: RubricSpec) -> str:
    lines = []
    for score in (4, 3, 2, 1, 0):
        lines.append(f"- {_LEVEL_NAMES[score]} ({score}): {rubric.levels[score]}")
    return "\n".join(lines)


def _render_definitions(defs: CueDefinitions, modality: str) -> str:
    lines = []
    for e in defs.for_modality(modality):
        lines.append(f"- {e['name']}: {e['physiological_response']}. "
                     f"Indicates: {e['response_indicator']}")
    return "\n".join(lines)


def build_prompt(rubric: RubricSpec, defs: CueDefinitions, payload: PromptPayload) -> str:
    """Instantiate the evaluation prompt for one rubric over one session's data."""
    if payload.modality != rubric.modality:
        raise ModalityMismatch(
            f"rubric {rubric.id} needs {rubric.modality} payload, got {payload.modality}")
    definitions = _render_definitions(defs, rubric.modality)
    parts = [
        f'You are an expert evaluator. Your task is to judge the data provided below '
        f'based on the criterion "{rubric.name}".',
        "",
        "Use the following scoring rubric:",
        _render_levels(rubric),
    ]
    if definitions:
        parts += ["Use the following definitions to interpret the cues:", definitions]
    parts += [
        "",
        "Instructions:",
        "1. Analyze the data provided below.",
        f"2. Evaluate how well the {rubric.name.lower()} is demonstrated based on the above rubric.",
        "3. Return your evaluation as a JSON object with two keys:",
        '   - "score": an integer from 0 to 4.',
        '   - "reason": a brief explanation for the score.',
        "",
        "Data:",
        payload.rich_data_text,
    ]
    return "\n".join(parts)
