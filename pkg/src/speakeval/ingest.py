"""Loaders and validation for session inputs: audio, transcript, landmarks, human scores.

All loaders reject invariant violations instead of repairing them (no silent
sorting or clamping). Audio is converted to a fixed internal representation
(16 kHz mono float in [-1, 1]) so that downstream frame math is deterministic.
"""

from __future__ import annotations

import csv
import json
import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.signal import resample_poly

from .errors import (
    CorruptFile,
    EmptyAudio,
    NegativeDuration,
    NonMonotoneTimestamps,
    SchemaError,
    UnknownExpressionLabel,
    UnsupportedFormat,
)

INTERNAL_RATE_HZ = 16_000
MIN_AUDIO_DURATION_S = 1.0
DURATION_SLACK_S = 1.0

EXPRESSION_LABELS = ("fear", "neutral", "disgust", "sad", "surprise", "happy", "anger")


@dataclass
class AudioTrack:
    samples: np.ndarray  # float64, normalized to [-1, 1]
    sample_rate_hz: int

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


@dataclass(frozen=True)
class TimedWord:
    text: str
    start_s: float
    end_s: float


@dataclass(frozen=True)
class LandmarkFrame:
    t_s: float
    left_wrist: Optional[tuple] = None
    right_wrist: Optional[tuple] = None
    left_shoulder: Optional[tuple] = None
    right_shoulder: Optional[tuple] = None
    left_hip: Optional[tuple] = None
    right_hip: Optional[tuple] = None
    left_hand_open: Optional[bool] = None
    right_hand_open: Optional[bool] = None
    expression: Optional[str] = None


@dataclass
class LandmarkStream:
    frames: list
    frame_width_px: int
    frame_height_px: int


@dataclass
class SessionBundle:
    session_id: str
    audio: AudioTrack
    transcript: list  # of TimedWord
    landmarks: list  # of LandmarkFrame
    frame_width_px: int
    frame_height_px: int


@dataclass
class HumanScoreSet:
    entries: dict  # (session_id, rubric_id) -> score


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


# ---------------------------------------------------------------------------
# Audio
# ---------------------------------------------------------------------------

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


def _parse_wav(raw: bytes):
    """Parse a RIFF WAV container; return (float samples per channel, rate).

    Handles PCM 8/16/24-bit integers and 32-bit IEEE float, mono or multi-channel.
    """
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise CorruptFile("not a RIFF/WAVE file")
    pos = 12
    fmt = None
    data = None
    while pos + 8 <= len(raw):
        chunk_id = raw[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise CorruptFile("fmt chunk truncated")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == _WAVE_FORMAT_EXTENSIBLE and len(body) >= 26:
                # sub-format GUID starts with the effective format code
                (sub,) = struct.unpack_from("<H", body, 24)
                fmt = (sub,) + fmt[1:]
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise CorruptFile("data chunk truncated")
            data = body
        pos += 8 + chunk_size + (chunk_size & 1)
    if fmt is None or data is None:
        raise CorruptFile("missing fmt or data chunk")

    audio_format, channels, rate, _byte_rate, _block_align, bits = fmt
    if channels < 1 or rate < 1:
        raise CorruptFile("invalid channel count or sample rate")

    if audio_format == _WAVE_FORMAT_PCM:
        if bits == 8:
            x = (np.frombuffer(data, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
        elif bits == 16:
            x = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
        elif bits == 24:
            b = np.frombuffer(data, dtype=np.uint8)
            b = b[: (len(b) // 3) * 3].reshape(-1, 3)
            as_int = (
                b[:, 0].astype(np.int32)
                | (b[:, 1].astype(np.int32) << 8)
                | (b[:, 2].astype(np.int32) << 16)
            )
            as_int = np.where(as_int >= 1 << 23, as_int - (1 << 24), as_int)
            x = as_int.astype(np.float64) / float(1 << 23)
        elif bits == 32:
            x = np.frombuffer(data, dtype="<i4").astype(np.float64) / float(1 << 31)
        else:
            raise UnsupportedFormat(f"unsupported PCM bit depth: {bits}")
    elif audio_format == _WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedFormat(f"unsupported float bit depth: {bits}")
        x = np.frombuffer(data, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedFormat(f"unsupported codec: 0x{audio_format:04x}")

    n = (len(x) // channels) * channels
    x = x[:n].reshape(-1, channels)
    return x, rate


def load_audio(path) -> AudioTrack:
    """Load a PCM WAV file as a mono 16 kHz track with samples in [-1, 1]."""
    raw = Path(path).read_bytes()
    x, rate = _parse_wav(raw)
    mono = x.mean(axis=1)
    if rate != INTERNAL_RATE_HZ:
        ratio = Fraction(INTERNAL_RATE_HZ, rate)
        mono = resample_poly(mono, ratio.numerator, ratio.denominator)
    mono = np.clip(mono, -1.0, 1.0)
    if not np.all(np.isfinite(mono)):
        raise CorruptFile("non-finite samples")
    track = AudioTrack(samples=mono, sample_rate_hz=INTERNAL_RATE_HZ)
    if track.duration_s < MIN_AUDIO_DURATION_S:
        raise EmptyAudio(f"audio shorter than {MIN_AUDIO_DURATION_S} s")
    return track


# ---------------------------------------------------------------------------
# Transcript
# ---------------------------------------------------------------------------

def _as_number(obj, key, entry) -> float:
    v = entry.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
        raise SchemaError(f"{obj}: field '{key}' missing or not a finite number")
    return float(v)


def load_transcript(path) -> list:
    """Load the transcript JSON array of word/start_s/end_s objects."""
    try:
        entries = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"transcript is not valid JSON: {e}") from e
    if not isinstance(entries, list):
        raise SchemaError("transcript must be a JSON array")
    words = []
    prev_start = -math.inf
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise SchemaError(f"word #{i}: not an object")
        text = entry.get("word")
        if not isinstance(text, str) or not text or any(c.isspace() for c in text):
            raise SchemaError(f"word #{i}: 'word' must be a non-empty token without whitespace")
        start = _as_number(f"word #{i}", "start_s", entry)
        end = _as_number(f"word #{i}", "end_s", entry)
        if start < 0:
            raise SchemaError(f"word #{i}: negative start_s")
        if end <= start:
            raise NegativeDuration(f"word #{i}: end_s {end} <= start_s {start}")
        if start < prev_start:
            raise NonMonotoneTimestamps(f"word #{i}: start_s decreases ({start} < {prev_start})")
        prev_start = start
        words.append(TimedWord(text=text, start_s=start, end_s=end))
    return words


# ---------------------------------------------------------------------------
# Landmarks
# ---------------------------------------------------------------------------

_POSE_KEYS = ("left_wrist", "right_wrist", "left_shoulder", "right_shoulder",
              "left_hip", "right_hip")


def _parse_point(name, value, width, height):
    if value is None:
        return None
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or any(not isinstance(c, (int, float)) or isinstance(c, bool) for c in value)):
        raise SchemaError(f"{name}: expected [x, y] or null")
    x, y = float(value[0]), float(value[1])
    if not (0 <= x <= width and 0 <= y <= height):
        raise SchemaError(f"{name}: coordinate ({x}, {y}) outside frame {width}x{height}")
    return (x, y)


def load_landmarks(path) -> LandmarkStream:
    """Load a landmark JSONL file (header line with frame dims, then frames)."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise SchemaError("empty landmark file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise SchemaError(f"landmark header is not valid JSON: {e}") from e
    if not isinstance(header, dict) or "frame_width_px" not in header or "frame_height_px" not in header:
        raise SchemaError("first line must carry frame_width_px and frame_height_px")
    width, height = header["frame_width_px"], header["frame_height_px"]
    if not isinstance(width, int) or not isinstance(height, int) or width <= 0 or height <= 0:
        raise SchemaError("frame dimensions must be positive integers")

    frames = []
    prev_t = -math.inf
    for i, line in enumerate(lines[1:]):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise SchemaError(f"frame #{i}: invalid JSON: {e}") from e
        if not isinstance(obj, dict):
            raise SchemaError(f"frame #{i}: not an object")
        t = _as_number(f"frame #{i}", "t_s", obj)
        if t <= prev_t:
            raise NonMonotoneTimestamps(f"frame #{i}: t_s {t} not strictly increasing")
        prev_t = t
        pose = obj.get("pose") or {}
        if not isinstance(pose, dict):
            raise SchemaError(f"frame #{i}: 'pose' must be an object")
        points = {k: _parse_point(f"frame #{i} {k}", pose.get(k), width, height)
                  for k in _POSE_KEYS}
        hands = obj.get("hands") or {}
        if not isinstance(hands, dict):
            raise SchemaError(f"frame #{i}: 'hands' must be an object")
        left_open = hands.get("left_open")
        right_open = hands.get("right_open")
        for v in (left_open, right_open):
            if v is not None and not isinstance(v, bool):
                raise SchemaError(f"frame #{i}: hand openness must be true/false/null")
        expression = obj.get("expression")
        if expression is not None and expression not in EXPRESSION_LABELS:
            raise UnknownExpressionLabel(f"frame #{i}: unknown expression '{expression}'")
        frames.append(LandmarkFrame(
            t_s=t,
            left_hand_open=left_open,
            right_hand_open=right_open,
            expression=expression,
            **points,
        ))
    return LandmarkStream(frames=frames, frame_width_px=width, frame_height_px=height)


# ---------------------------------------------------------------------------
# Human scores
# ---------------------------------------------------------------------------

def load_human_scores(path) -> HumanScoreSet:
    """Load the human-rating CSV (session_id, rubric_id, score)."""
    entries = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) < {"session_id", "rubric_id", "score"}:
            raise SchemaError("human score CSV needs header session_id,rubric_id,score")
        for i, row in enumerate(reader):
            try:
                rubric_id = int(row["rubric_id"])
                score = int(row["score"])
            except (ValueError, TypeError) as e:
                raise SchemaError(f"row #{i}: non-integer rubric_id or score") from e
            if not 1 <= rubric_id <= 12:
                raise SchemaError(f"row #{i}: rubric_id {rubric_id} outside 1..12")
            if score not in (0, 1, 2, 3, 4):
                raise SchemaError(f"row #{i}: score {score} outside 0..4")
            entries[(row["session_id"], rubric_id)] = score
    return HumanScoreSet(entries=entries)


# ---------------------------------------------------------------------------
# Session-level validation
# ---------------------------------------------------------------------------

def validate_session(bundle: SessionBundle,
                     gap_warning_s: float = 0.5,
                     expression_coverage_floor: float = 0.5) -> ValidationReport:
    """Cross-check modality durations and coverage; never raises."""
    report = ValidationReport()
    duration = bundle.audio.duration_s

    if not bundle.transcript:
        report.failures.append("empty transcript")
    else:
        last_word = max(w.end_s for w in bundle.transcript)
        if last_word > duration + DURATION_SLACK_S:
            report.failures.append(
                f"duration mismatch: transcript ends at {last_word:.2f} s, audio is {duration:.2f} s")

    if not bundle.landmarks:
        report.failures.append("empty landmark stream")
    else:
        last_t = bundle.landmarks[-1].t_s
        if last_t > duration + DURATION_SLACK_S:
            report.failures.append(
                f"duration mismatch: landmarks end at {last_t:.2f} s, audio is {duration:.2f} s")
        if duration - last_t > DURATION_SLACK_S:
            report.failures.append(
                f"duration mismatch: landmarks cover only {last_t:.2f} of {duration:.2f} s")
        times = [f.t_s for f in bundle.landmarks]
        for a, b in zip(times, times[1:]):
            if b - a > gap_warning_s:
                report.warnings.append(f"landmark gap of {b - a:.2f} s at {a:.2f} s")
        labeled = sum(1 for f in bundle.landmarks if f.expression is not None)
        if labeled / len(bundle.landmarks) < expression_coverage_floor:
            report.warnings.append(
                f"expression labels cover {100 * labeled / len(bundle.landmarks):.0f}% of frames")

    return report


def load_session(session_id: str, audio_path, transcript_path, landmarks_path) -> SessionBundle:
    """Load all per-session inputs into one bundle."""
    audio = load_audio(audio_path)
    transcript = load_transcript(transcript_path)
    stream = load_landmarks(landmarks_path)
    return SessionBundle(
        session_id=session_id,
        audio=audio,
        transcript=transcript,
        landmarks=stream.frames,
        frame_width_px=stream.frame_width_px,
        frame_height_px=stream.frame_height_px,
    )
