"""Per-session orchestration: raw bundle -> features -> fused segment records.

Two passes per session: pass 1 computes prosody subframes and gesture events
over the whole recording and fits the per-speaker quartile thresholds; pass 2
labels every 10-second window against those thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import gesture, prosody, segmenter
from .config import Tunables
from .errors import InsufficientData, InsufficientLandmarks, TooFewSamples
from .ingest import SessionBundle
from .prosody import QuartileThresholds


@dataclass
class SessionFeatures:
    session_id: str
    windows: list
    subframes_per_window: list  # list of lists of SubframeFeatures
    gestures: list              # of PairedGesture, classified and time-ordered
    pitch_thresholds: QuartileThresholds | None
    rms_thresholds: QuartileThresholds | None
    intonation_thresholds: QuartileThresholds | None
    area_thresholds: dict       # axis -> QuartileThresholds | None


def _safe_quartiles(values, name):
    try:
        return prosody.fit_quartiles(values, feature_name=name)
    except InsufficientData:
        return None


def _classify(value, thresholds):
    if thresholds is None:
        return prosody.LEVEL_NORMAL
    return prosody.classify_level(value, thresholds)


def extract_features(bundle: SessionBundle, tunables: Tunables | None = None) -> SessionFeatures:
    """Pass 1: prosody subframes, gesture events, per-speaker thresholds."""
    tunables = tunables or Tunables()
    frames = prosody.extract_prosody(bundle.audio)
    windows = segmenter.make_windows(bundle.audio.duration_s)
    subframes_per_window = [
        prosody.aggregate_subframes(frames, w.as_time_window()) for w in windows
    ]
    all_sub = [s for per_window in subframes_per_window for s in per_window]
    pitch_thr = _safe_quartiles([s.pitch_hz for s in all_sub if s.pitch_hz is not None], "pitch_hz")
    rms_thr = _safe_quartiles([s.rms_mean for s in all_sub if s.rms_mean is not None], "rms")
    into_thr = _safe_quartiles(
        [s.intonation_hz_per_s for s in all_sub if s.intonation_hz_per_s is not None],
        "intonation_hz_per_s")

    prominence_px = tunables.prominence_fraction * bundle.frame_width_px
    events = {"left": {"x": [], "y": []}, "right": {"x": [], "y": []}}
    for wrist in ("left", "right"):
        for axis in ("x", "y"):
            trace = gesture.trace_from_frames(bundle.landmarks, wrist, axis)
            if len(trace.values) < tunables.smoothing_window:
                continue
            smoothed = gesture.smooth_trace(trace, window=tunables.smoothing_window)
            events[wrist][axis] = gesture.detect_extrema(smoothed, prominence_px)

    gestures = []
    area_thresholds = {}
    for axis in ("x", "y"):
        paired = gesture.pair_events(events["left"][axis], events["right"][axis],
                                     tolerance_s=tunables.pairing_tolerance_s)
        thresholds = gesture.fit_area_quartiles(paired, axis)
        area_thresholds[axis] = thresholds
        for g in paired:
            g.spread = gesture.classify_spread(g.area_px_s, thresholds)
        gestures.extend(paired)
    gestures.sort(key=lambda g: g.t_s)

    return SessionFeatures(
        session_id=bundle.session_id,
        windows=windows,
        subframes_per_window=subframes_per_window,
        gestures=gestures,
        pitch_thresholds=pitch_thr,
        rms_thresholds=rms_thr,
        intonation_thresholds=into_thr,
        area_thresholds=area_thresholds,
    )


def _window_frames(bundle, window):
    return [f for f in bundle.landmarks if window.start_s <= f.t_s < window.end_s]


def _nonverbal_summary(bundle, window, features, tunables) -> gesture.NonverbalSegmentSummary:
    frames = _window_frames(bundle, window)
    try:
        posture = gesture.detect_posture(frames, max_deg=tunables.upright_max_deg)
    except InsufficientLandmarks:
        posture = [gesture.POSTURE_UPRIGHT]
    try:
        pose = gesture.detect_pose_openness(frames, sustain_s=tunables.crossing_sustain_s)
    except InsufficientLandmarks:
        pose = [gesture.POSE_OPEN]
    horizontal = [gesture.label_gesture(g) for g in features.gestures
                  if g.axis == "x" and window.start_s <= g.t_s < window.end_s]
    vertical = [gesture.label_gesture(g) for g in features.gestures
                if g.axis == "y" and window.start_s <= g.t_s < window.end_s]
    hands = gesture.summarize_hands(
        frames,
        sustain_s=tunables.overlap_sustain_s,
        shoulder_fraction=tunables.overlap_shoulder_fraction,
        frequency_floor=tunables.frequency_floor,
    )
    expression = gesture.summarize_expression(frames, frequency_floor=tunables.frequency_floor)
    return gesture.NonverbalSegmentSummary(
        posture_labels=posture,
        pose_labels=pose,
        horizontal_gesture=horizontal or [gesture.NO_GESTURE],
        vertical_gesture=vertical or [gesture.NO_GESTURE],
        hand_configuration=hands,
        face_expression=expression,
    )


def assemble_session(bundle: SessionBundle,
                     features: SessionFeatures | None = None,
                     tunables: Tunables | None = None) -> list:
    """Pass 2: label every window and fuse the channels into SegmentRecords."""
    tunables = tunables or Tunables()
    if features is None:
        features = extract_features(bundle, tunables)

    records = []
    for window, subframes in zip(features.windows, features.subframes_per_window):
        tw = window.as_time_window()
        vocal = prosody.VocalLabelTrack(
            pitch_labels=[_classify(s.pitch_hz, features.pitch_thresholds) for s in subframes],
            loudness_labels=[_classify(s.rms_mean, features.rms_thresholds) for s in subframes],
            intonation_labels=[_classify(s.intonation_hz_per_s, features.intonation_thresholds)
                               for s in subframes],
            speech_rate_text=prosody.compute_speech_rate(bundle.transcript, tw),
        )
        nonverbal = _nonverbal_summary(bundle, window, features, tunables)
        transcript_text = segmenter.segment_transcript(bundle.transcript, window)
        records.append(segmenter.assemble_record(window, transcript_text, vocal, nonverbal))
    return records
