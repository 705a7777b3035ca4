"""Wrist-trajectory gesture analysis plus posture, pose, hand, and expression cues.

Wrist traces are smoothed, extrema above/below the session-median baseline
become gesture events with trapezoidal areas, left/right events pair into
unified gestures when near-simultaneous, and per-axis area quartiles drive
the spread class. Label strings form a closed grammar (see GESTURE_LABEL_RE).
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import (
    InsufficientData,
    InsufficientLandmarks,
    NoBaseline,
    TooFewSamples,
)
from .ingest import LandmarkFrame
from .prosody import QuartileThresholds, fit_quartiles

SMOOTHING_WINDOW = 5
PROMINENCE_FRACTION = 0.02  # of frame width
PAIRING_TOLERANCE_S = 0.25
CROSSING_SUSTAIN_S = 1.0
OVERLAP_SUSTAIN_S = 0.5
OVERLAP_SHOULDER_FRACTION = 0.5
FREQUENCY_FLOOR = 0.10
UPRIGHT_MAX_DEG = 15.0

POSTURE_UPRIGHT = "Upright"
POSTURE_NOT_UPRIGHT = "Not Upright"
POSE_OPEN = "Open Pose (Arms Uncrossed)"
POSE_CLOSED = "Closed Pose (Arms Crossed)"
NO_GESTURE = "no notable gesture"

SPREAD_ORDER = {"normal": 0, "medium": 1, "high": 2}

GESTURE_LABEL_RE = re.compile(
    r"^(?:"
    r"(?:normal|medium|high) wide unified gesture towards the (?:left|right)"
    r"|(?:normal|medium|high) unilateral gesture"
    r"|(?:normal|medium|high) area unified (?:rising|falling) gesture"
    r"|(?:normal|medium|high) unilateral down or up gesture"
    r"|no notable gesture"
    r")$"
)


@dataclass
class WristTrace:
    wrist: str  # "left" | "right"
    axis: str   # "x" | "y"
    times: np.ndarray
    values: np.ndarray
    baseline_px: Optional[float] = None


@dataclass
class GestureEvent:
    axis: str
    kind: str  # "peak" | "valley"
    wrist: str
    t_start_s: float
    t_extremum_s: float
    t_end_s: float
    area_px_s: float
    displacement_px: float


@dataclass
class PairedGesture:
    laterality: str  # "unified" | "unilateral"
    events: list
    axis: str
    spread: str = "medium"

    @property
    def t_s(self) -> float:
        return float(np.mean([e.t_extremum_s for e in self.events]))

    @property
    def area_px_s(self) -> float:
        return sum(e.area_px_s for e in self.events)

    @property
    def mean_displacement_px(self) -> float:
        return float(np.mean([e.displacement_px for e in self.events]))


@dataclass
class NonverbalSegmentSummary:
    posture_labels: list
    pose_labels: list
    horizontal_gesture: list
    vertical_gesture: list
    hand_configuration: list
    face_expression: list


def trace_from_frames(frames: Sequence[LandmarkFrame], wrist: str, axis: str) -> WristTrace:
    """Collect one wrist coordinate over time; baseline = session median."""
    attr = f"{wrist}_wrist"
    coord = 0 if axis == "x" else 1
    times, values = [], []
    for f in frames:
        p = getattr(f, attr)
        if p is not None:
            times.append(f.t_s)
            values.append(p[coord])
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    baseline = float(np.median(values)) if len(values) else None
    return WristTrace(wrist=wrist, axis=axis, times=times, values=values,
                      baseline_px=baseline)


def smooth_trace(trace: WristTrace, window: int = SMOOTHING_WINDOW) -> WristTrace:
    """Centered moving average; edges average the available neighbors."""
    n = len(trace.values)
    if n < window:
        raise TooFewSamples(f"need >= {window} samples, got {n}")
    kernel = np.ones(window)
    sums = np.convolve(trace.values, kernel, mode="same")
    counts = np.convolve(np.ones(n), kernel, mode="same")
    return replace(trace, values=sums / counts)


def _crossing_time(t0, v0, t1, v1, baseline) -> float:
    if v1 == v0:
        return t0
    return t0 + (baseline - v0) * (t1 - t0) / (v1 - v0)


def _event_area(times, values, baseline, i_left, i_right, t_left, t_right) -> float:
    """Trapezoid of |value - baseline| between the crossing times."""
    ts = [t_left] + list(times[i_left:i_right + 1]) + [t_right]
    vs = [0.0] + [abs(v - baseline) for v in values[i_left:i_right + 1]] + [0.0]
    return float(np.trapezoid(vs, ts))


def detect_extrema(trace: WristTrace, prominence_px: float) -> list:
    """Baseline-referenced peaks/valleys with extents at baseline crossings."""
    if trace.baseline_px is None:
        raise NoBaseline("trace has no baseline")
    t, v, base = trace.times, trace.values, trace.baseline_px
    n = len(v)
    if n < 3:
        return []
    dev = v - base

    events = []
    for i in range(1, n - 1):
        is_peak = dev[i] > 0 and v[i] >= v[i - 1] and v[i] > v[i + 1]
        is_valley = dev[i] < 0 and v[i] <= v[i - 1] and v[i] < v[i + 1]
        if not (is_peak or is_valley):
            continue
        if abs(dev[i]) < prominence_px:
            continue
        # walk outward to the nearest baseline crossings (or trace ends)
        j = i
        while j > 0 and dev[j - 1] * dev[i] > 0:
            j -= 1
        if j == 0 and dev[0] * dev[i] > 0:
            t_left = t[0]
            i_left = 0
        else:
            t_left = _crossing_time(t[j - 1], v[j - 1], t[j], v[j], base) if j > 0 else t[0]
            i_left = j
        k = i
        while k < n - 1 and dev[k + 1] * dev[i] > 0:
            k += 1
        if k == n - 1 and dev[n - 1] * dev[i] > 0:
            t_right = t[n - 1]
            i_right = n - 1
        else:
            t_right = _crossing_time(t[k], v[k], t[k + 1], v[k + 1], base) if k < n - 1 else t[n - 1]
            i_right = k
        # keep only the largest extremum within one baseline excursion
        if events and events[-1].t_start_s == t_left and events[-1].kind == ("peak" if is_peak else "valley"):
            if abs(dev[i]) <= abs(events[-1].displacement_px):
                continue
            events.pop()
        events.append(GestureEvent(
            axis=trace.axis,
            kind="peak" if is_peak else "valley",
            wrist=trace.wrist,
            t_start_s=float(t_left),
            t_extremum_s=float(t[i]),
            t_end_s=float(t_right),
            area_px_s=_event_area(t, v, base, i_left, i_right, t_left, t_right),
            displacement_px=float(dev[i]),
        ))
    return events


def pair_events(left: Sequence[GestureEvent], right: Sequence[GestureEvent],
                tolerance_s: float = PAIRING_TOLERANCE_S) -> list:
    """Greedy chronological left/right matching into unified/unilateral gestures.

    Only same-kind events pair (a peak with a peak, a valley with a valley):
    simultaneity of opposite extrema is antiphase motion, not a joint gesture.
    """
    paired = []
    for kind in ("peak", "valley"):
        ls = sorted((e for e in left if e.kind == kind), key=lambda e: e.t_extremum_s)
        rs = sorted((e for e in right if e.kind == kind), key=lambda e: e.t_extremum_s)
        i = j = 0
        while i < len(ls) and j < len(rs):
            dt = ls[i].t_extremum_s - rs[j].t_extremum_s
            if abs(dt) <= tolerance_s:
                paired.append(PairedGesture(laterality="unified",
                                            events=[ls[i], rs[j]],
                                            axis=ls[i].axis))
                i += 1
                j += 1
            elif dt < 0:
                paired.append(PairedGesture(laterality="unilateral", events=[ls[i]],
                                            axis=ls[i].axis))
                i += 1
            else:
                paired.append(PairedGesture(laterality="unilateral", events=[rs[j]],
                                            axis=rs[j].axis))
                j += 1
        for e in ls[i:]:
            paired.append(PairedGesture(laterality="unilateral", events=[e], axis=e.axis))
        for e in rs[j:]:
            paired.append(PairedGesture(laterality="unilateral", events=[e], axis=e.axis))
    paired.sort(key=lambda g: g.t_s)
    return paired


def classify_spread(area: float, thresholds: Optional[QuartileThresholds]) -> str:
    """Area below Q1 -> normal, inside IQR -> medium, above Q3 -> high."""
    if thresholds is None:
        return "medium"
    if area < thresholds.q1:
        return "normal"
    if area > thresholds.q3:
        return "high"
    return "medium"


def fit_area_quartiles(gestures: Sequence[PairedGesture], axis: str) -> Optional[QuartileThresholds]:
    """Per-axis quartiles over gesture areas; None when < 4 events on the axis."""
    areas = [g.area_px_s for g in gestures if g.axis == axis]
    try:
        return fit_quartiles(areas, feature_name=f"gesture_area_{axis}")
    except InsufficientData:
        return None


def label_gesture(g: PairedGesture) -> str:
    """Render the gesture label grammar string for a classified gesture."""
    if g.axis == "x":
        if g.laterality == "unified":
            direction = "right" if g.mean_displacement_px > 0 else "left"
            return f"{g.spread} wide unified gesture towards the {direction}"
        return f"{g.spread} unilateral gesture"
    if g.laterality == "unified":
        # y grows downward: positive displacement is a falling motion
        direction = "falling" if g.mean_displacement_px > 0 else "rising"
        return f"{g.spread} area unified {direction} gesture"
    return f"{g.spread} unilateral down or up gesture"


# ---------------------------------------------------------------------------
# Posture / pose / hands / expression
# ---------------------------------------------------------------------------

def _midpoint(a, b):
    return ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)


def detect_posture(frames: Sequence[LandmarkFrame], max_deg: float = UPRIGHT_MAX_DEG) -> list:
    """Upright iff the hip->shoulder torso vector stays within 15 deg of vertical."""
    judged = []
    for f in frames:
        if None in (f.left_shoulder, f.right_shoulder, f.left_hip, f.right_hip):
            continue
        sx, sy = _midpoint(f.left_shoulder, f.right_shoulder)
        hx, hy = _midpoint(f.left_hip, f.right_hip)
        dx, dy = sx - hx, sy - hy
        angle = math.degrees(math.atan2(abs(dx), abs(dy))) if (dx, dy) != (0, 0) else 0.0
        judged.append(POSTURE_UPRIGHT if angle <= max_deg else POSTURE_NOT_UPRIGHT)
    if not frames or len(judged) < 0.5 * len(frames):
        raise InsufficientLandmarks("torso landmarks present in < 50% of frames")
    return list(dict.fromkeys(judged))


def detect_pose_openness(frames: Sequence[LandmarkFrame], sustain_s: float = CROSSING_SUSTAIN_S) -> list:
    """Closed pose requires >= 1 s of sustained wrist crossing, else open."""
    judged = []  # (t_s, crossed)
    for f in frames:
        if None in (f.left_wrist, f.right_wrist, f.left_shoulder, f.right_shoulder):
            continue
        wrist_order = f.left_wrist[0] - f.right_wrist[0]
        shoulder_order = f.left_shoulder[0] - f.right_shoulder[0]
        judged.append((f.t_s, wrist_order * shoulder_order < 0))
    if not judged:
        raise InsufficientLandmarks("no frame with both wrists and shoulders")

    labels = []
    run_start = None
    for idx, (t, crossed) in enumerate(judged):
        if crossed:
            if run_start is None:
                run_start = t
            sustained = t - run_start >= sustain_s
            labels.append(POSE_CLOSED if sustained else None)
            if sustained:
                # back-fill the run start once sustained
                for back in range(len(labels) - 2, -1, -1):
                    if judged[back][1] and labels[back] is None:
                        labels[back] = POSE_CLOSED
                    else:
                        break
        else:
            run_start = None
            labels.append(POSE_OPEN)
    resolved = [lab if lab is not None else POSE_OPEN for lab in labels]
    return list(dict.fromkeys(resolved))


def summarize_hands(frames: Sequence[LandmarkFrame],
                    sustain_s: float = OVERLAP_SUSTAIN_S,
                    shoulder_fraction: float = OVERLAP_SHOULDER_FRACTION,
                    frequency_floor: float = FREQUENCY_FLOOR) -> list:
    """Openness combinations above the frequency floor plus an overlap flag."""
    combos = Counter()
    judged = 0
    for f in frames:
        if f.left_hand_open is None or f.right_hand_open is None:
            continue
        judged += 1
        combos[(f.left_hand_open, f.right_hand_open)] += 1

    out = []
    if judged:
        ranked = sorted(combos.items(), key=lambda kv: (-kv[1],))
        for (left_open, right_open), count in ranked:
            if count / judged >= frequency_floor:
                left = "open" if left_open else "closed"
                right = "open" if right_open else "closed"
                out.append(f"Left hand: {left}, Right hand: {right}")

    shoulder_widths = [
        abs(f.left_shoulder[0] - f.right_shoulder[0])
        for f in frames
        if f.left_shoulder is not None and f.right_shoulder is not None
    ]
    overlap = "No"
    if shoulder_widths:
        threshold = shoulder_fraction * float(np.median(shoulder_widths))
        run_start = None
        for f in frames:
            if f.left_wrist is None or f.right_wrist is None:
                run_start = None
                continue
            dist = math.dist(f.left_wrist, f.right_wrist)
            if dist < threshold:
                if run_start is None:
                    run_start = f.t_s
                if f.t_s - run_start >= sustain_s:
                    overlap = "Yes"
                    break
            else:
                run_start = None
    out.append(f"Hands on top of each other: {overlap}")
    return out


def summarize_expression(frames: Sequence[LandmarkFrame],
                         frequency_floor: float = FREQUENCY_FLOOR) -> list:
    """Expression labels above the frequency floor, most frequent first."""
    counts = Counter(f.expression for f in frames if f.expression is not None)
    total = sum(counts.values())
    if total == 0:
        return ["neutral"]
    ranked = counts.most_common()
    out = [label for label, c in ranked if c / total >= frequency_floor]
    return out or ["neutral"]
