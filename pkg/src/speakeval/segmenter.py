"""10-second windowing, channel fusion into segment records, and serialization.

The rendered document is deterministic: fixed key order, fixed float
formatting, one `[start - end "secs"]: {...}` block per segment.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ChannelLengthMismatch, NonPositiveDuration
from .gesture import NonverbalSegmentSummary
from .ingest import TimedWord
from .prosody import TimeWindow, VocalLabelTrack

WINDOW_S = 10.0
MIN_FINAL_WINDOW_S = 2.0

RECORD_KEYS = (
    "transcript",
    "posture",
    "pose",
    "pitch",
    "loudness",
    "speech_rate",
    "intonation_pattern",
    "face_expression",
    "horizontal_gesture",
    "vertical_gesture",
    "hand_configuration",
)


@dataclass(frozen=True)
class SegmentWindow:
    start_s: float
    end_s: float
    index: int

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s

    def as_time_window(self) -> TimeWindow:
        return TimeWindow(start_s=self.start_s, end_s=self.end_s)


@dataclass
class SegmentRecord:
    window: SegmentWindow
    transcript: str
    posture: list
    pose: list
    pitch: list
    loudness: list
    speech_rate: str
    intonation_pattern: list
    face_expression: list
    horizontal_gesture: list
    vertical_gesture: list
    hand_configuration: list

    def payload(self) -> dict:
        return {k: getattr(self, k) for k in RECORD_KEYS}


def make_windows(duration_s: float) -> list:
    """Tile [0, duration) into 10 s windows; short remainders merge backward."""
    if duration_s <= 0:
        raise NonPositiveDuration(f"duration {duration_s} s")
    windows = []
    full = int(duration_s // WINDOW_S)
    remainder = duration_s - full * WINDOW_S
    for i in range(full):
        windows.append(SegmentWindow(start_s=i * WINDOW_S, end_s=(i + 1) * WINDOW_S, index=i))
    if remainder > 1e-9:
        if remainder >= MIN_FINAL_WINDOW_S or not windows:
            windows.append(SegmentWindow(start_s=full * WINDOW_S, end_s=duration_s, index=full))
        else:
            last = windows.pop()
            windows.append(SegmentWindow(start_s=last.start_s, end_s=duration_s, index=last.index))
    return windows


def segment_transcript(transcript: Sequence[TimedWord], window: SegmentWindow) -> str:
    """Words whose midpoint falls inside the window, joined by single spaces."""
    words = [w.text for w in transcript
             if window.start_s <= (w.start_s + w.end_s) / 2 < window.end_s]
    return " ".join(words)


def assemble_record(window: SegmentWindow,
                    transcript_text: str,
                    vocal: VocalLabelTrack,
                    nonverbal: NonverbalSegmentSummary) -> SegmentRecord:
    """Fuse the per-window channels into one record, enforcing list lengths."""
    n_sub = max(1, int(math.floor(window.duration_s + 1e-9)))
    for name, labels in (("pitch", vocal.pitch_labels),
                         ("loudness", vocal.loudness_labels),
                         ("intonation_pattern", vocal.intonation_labels)):
        if len(labels) != n_sub:
            raise ChannelLengthMismatch(
                f"{name}: {len(labels)} labels for a {n_sub}-subframe window")
    for name, labels in (("posture", nonverbal.posture_labels),
                         ("pose", nonverbal.pose_labels),
                         ("face_expression", nonverbal.face_expression),
                         ("horizontal_gesture", nonverbal.horizontal_gesture),
                         ("vertical_gesture", nonverbal.vertical_gesture),
                         ("hand_configuration", nonverbal.hand_configuration)):
        if not labels:
            raise ChannelLengthMismatch(f"{name}: empty channel")
    return SegmentRecord(
        window=window,
        transcript=transcript_text,
        posture=list(nonverbal.posture_labels),
        pose=list(nonverbal.pose_labels),
        pitch=list(vocal.pitch_labels),
        loudness=list(vocal.loudness_labels),
        speech_rate=vocal.speech_rate_text,
        intonation_pattern=list(vocal.intonation_labels),
        face_expression=list(nonverbal.face_expression),
        horizontal_gesture=list(nonverbal.horizontal_gesture),
        vertical_gesture=list(nonverbal.vertical_gesture),
        hand_configuration=list(nonverbal.hand_configuration),
    )


def format_time(t: float) -> str:
    """Compact time formatting: 70.0, 70.25, 96.3."""
    text = f"{t:.2f}".rstrip("0")
    return text + "0" if text.endswith(".") else text


def render_record(record: SegmentRecord) -> str:
    header = f'[{format_time(record.window.start_s)} - {format_time(record.window.end_s)} "secs"]: '
    return header + json.dumps(record.payload(), indent=1, ensure_ascii=False)


def render_session(records: Sequence[SegmentRecord]) -> str:
    """One header+JSON block per record, blank-line separated, deterministic."""
    return "\n\n".join(render_record(r) for r in records) + ("\n" if records else "")


_BLOCK_RE = re.compile(r'^\[(?P<start>[0-9.]+) - (?P<end>[0-9.]+) "secs"\]: ', re.M)


def parse_session(text: str) -> list:
    """Inverse of render_session (used for round-trip checks and tooling)."""
    records = []
    matches = list(_BLOCK_RE.finditer(text))
    for idx, m in enumerate(matches):
        end = matches[idx + 1].start() if idx + 1 < len(matches) else len(text)
        body = json.loads(text[m.end():end])
        window = SegmentWindow(start_s=float(m.group("start")),
                               end_s=float(m.group("end")), index=idx)
        records.append(SegmentRecord(window=window, **{k: body[k] for k in RECORD_KEYS}))
    return records


def records_to_json(records: Sequence[SegmentRecord]) -> str:
    """Machine-readable variant: JSON array with window metadata per record."""
    out = []
    for r in records:
        obj = {"window": {"start_s": r.window.start_s, "end_s": r.window.end_s,
                          "index": r.window.index}}
        obj.update(r.payload())
        out.append(obj)
    return json.dumps(out, indent=1, ensure_ascii=False)


def records_from_json(text: str) -> list:
    records = []
    for obj in json.loads(text):
        w = obj["window"]
        window = SegmentWindow(start_s=w["start_s"], end_s=w["end_s"], index=w["index"])
        records.append(SegmentRecord(window=window, **{k: obj[k] for k in RECORD_KEYS}))
    return records
