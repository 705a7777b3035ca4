"""Vocal feature extraction: pitch, loudness, intonation, speech rate.

Pitch uses a difference-function detector (cumulative-mean-normalized
difference with an absolute threshold and parabolic refinement) over
1024-sample windows hopped by 256 samples at the 16 kHz internal rate.
Per-speaker quartile thresholds turn raw values into Low/Normal/High labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    AudioTooShort,
    EmptyWindow,
    InsufficientData,
    ZeroDurationWindow,
)
from .ingest import AudioTrack, TimedWord

FRAME_SIZE = 1024
HOP_SIZE = 256
F0_MIN_HZ = 65.0
F0_MAX_HZ = 500.0
YIN_THRESHOLD = 0.15

LEVEL_LOW = "Low"
LEVEL_NORMAL = "Normal"
LEVEL_HIGH = "High"
LEVEL_ORDER = {LEVEL_LOW: 0, LEVEL_NORMAL: 1, LEVEL_HIGH: 2}


@dataclass
class ProsodyFrame:
    t_s: float
    f0_hz: Optional[float] = None
    rms: Optional[float] = None


@dataclass
class SubframeFeatures:
    index: int
    pitch_hz: Optional[float]
    rms_mean: Optional[float]
    intonation_hz_per_s: Optional[float]


@dataclass(frozen=True)
class QuartileThresholds:
    q1: float
    q3: float
    feature_name: str


@dataclass
class VocalLabelTrack:
    pitch_labels: list
    loudness_labels: list
    intonation_labels: list
    speech_rate_text: str


@dataclass(frozen=True)
class TimeWindow:
    start_s: float
    end_s: float

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


def _frame(samples: np.ndarray) -> np.ndarray:
    n = len(samples)
    if n < FRAME_SIZE:
        raise AudioTooShort(f"need at least {FRAME_SIZE} samples, got {n}")
    count = 1 + (n - FRAME_SIZE) // HOP_SIZE
    idx = np.arange(FRAME_SIZE)[None, :] + HOP_SIZE * np.arange(count)[:, None]
    return samples[idx]


def _frame_centers(count: int, rate: int) -> np.ndarray:
    return (HOP_SIZE * np.arange(count) + FRAME_SIZE / 2) / rate


def _difference_function(frames: np.ndarray, tau_max: int) -> np.ndarray:
    """d(tau) for each frame via FFT autocorrelation, tau in [0, tau_max]."""
    n = frames.shape[1]
    fft_size = 1 << (2 * n - 1).bit_length()
    spectra = np.fft.rfft(frames, fft_size, axis=1)
    acf = np.fft.irfft(spectra * np.conj(spectra), fft_size, axis=1)[:, :tau_max + 1]
    sq = frames ** 2
    csum = np.concatenate([np.zeros((frames.shape[0], 1)), np.cumsum(sq, axis=1)], axis=1)
    taus = np.arange(tau_max + 1)
    # energy of x[0:n-tau] and x[tau:n]
    head = csum[:, n - taus] - csum[:, 0:1]
    tail = csum[:, n:n + 1] - csum[:, taus]
    return head + tail - 2.0 * acf


def _cmndf(d: np.ndarray) -> np.ndarray:
    running = np.cumsum(d[:, 1:], axis=1)
    taus = np.arange(1, d.shape[1])
    out = np.ones_like(d)
    with np.errstate(divide="ignore", invalid="ignore"):
        norm = d[:, 1:] * taus / running
    out[:, 1:] = np.where(running > 0, norm, 1.0)
    return out


def _parabolic_refine(d_row: np.ndarray, tau: int) -> float:
    if tau <= 0 or tau >= len(d_row) - 1:
        return float(tau)
    a, b, c = d_row[tau - 1], d_row[tau], d_row[tau + 1]
    denom = a - 2 * b + c
    if denom == 0:
        return float(tau)
    shift = 0.5 * (a - c) / denom
    return tau + float(np.clip(shift, -1.0, 1.0))


def extract_pitch_track(audio: AudioTrack) -> list:
    """Per-frame fundamental frequency; unvoiced frames have f0_hz None."""
    rate = audio.sample_rate_hz
    frames = _frame(np.asarray(audio.samples, dtype=np.float64))
    tau_min = max(2, int(rate / F0_MAX_HZ))
    tau_max = min(FRAME_SIZE - 2, int(math.ceil(rate / F0_MIN_HZ)))
    d = _difference_function(frames, tau_max + 1)
    cm = _cmndf(d)
    centers = _frame_centers(len(frames), rate)

    out = []
    for i in range(len(frames)):
        row = cm[i]
        f0 = None
        below = np.nonzero(row[tau_min:tau_max + 1] < YIN_THRESHOLD)[0]
        if below.size:
            tau = tau_min + int(below[0])
            # walk to the local minimum of the dip
            while tau + 1 <= tau_max and row[tau + 1] < row[tau]:
                tau += 1
            tau_star = _parabolic_refine(d[i], tau)
            candidate = rate / tau_star
            if F0_MIN_HZ <= candidate <= F0_MAX_HZ:
                f0 = candidate
        out.append(ProsodyFrame(t_s=float(centers[i]), f0_hz=f0))
    return out


def extract_rms_track(audio: AudioTrack) -> list:
    """Per-frame RMS energy over the same 1024/256 windowing as pitch."""
    frames = _frame(np.asarray(audio.samples, dtype=np.float64))
    rms = np.sqrt(np.mean(frames ** 2, axis=1))
    centers = _frame_centers(len(frames), audio.sample_rate_hz)
    return [ProsodyFrame(t_s=float(t), rms=float(v)) for t, v in zip(centers, rms)]


def extract_prosody(audio: AudioTrack) -> list:
    """Combined pitch + RMS track on the shared framing."""
    pitch = extract_pitch_track(audio)
    rms = extract_rms_track(audio)
    return [ProsodyFrame(t_s=p.t_s, f0_hz=p.f0_hz, rms=r.rms)
            for p, r in zip(pitch, rms)]


def aggregate_subframes(frames: Sequence[ProsodyFrame], window: TimeWindow) -> list:
    """Split a segment window into 1 s subframes and summarize each.

    The final subframe absorbs any fractional remainder so a window always
    yields exactly floor(duration) subframes.
    """
    if window.duration_s <= 0:
        raise EmptyWindow(f"window [{window.start_s}, {window.end_s}) is empty")
    n_sub = max(1, int(math.floor(window.duration_s + 1e-9)))
    hop_dt = HOP_SIZE / 16_000.0

    out = []
    for i in range(n_sub):
        lo = window.start_s + i
        hi = window.end_s if i == n_sub - 1 else lo + 1.0
        members = [f for f in frames if lo <= f.t_s < hi]
        voiced = [f.f0_hz for f in members if f.f0_hz is not None]
        pitch = float(np.median(voiced)) if voiced else None
        rms_values = [f.rms for f in members if f.rms is not None]
        rms_mean = float(np.mean(rms_values)) if rms_values else None
        deltas = []
        for a, b in zip(members, members[1:]):
            if a.f0_hz is not None and b.f0_hz is not None:
                dt = b.t_s - a.t_s
                if dt > 0 and dt < 2 * hop_dt + 1e-9:
                    deltas.append(abs(b.f0_hz - a.f0_hz) / dt)
        intonation = float(np.mean(deltas)) if len(voiced) >= 2 and deltas else None
        out.append(SubframeFeatures(index=i, pitch_hz=pitch, rms_mean=rms_mean,
                                    intonation_hz_per_s=intonation))
    return out


def fit_quartiles(values: Sequence[float], feature_name: str = "") -> QuartileThresholds:
    """Q1/Q3 via linear interpolation of order statistics at q*(n-1)."""
    finite = [v for v in values if v is not None and math.isfinite(v)]
    if len(finite) < 4:
        raise InsufficientData(f"need >= 4 values for quartiles, got {len(finite)}")
    q1, q3 = np.percentile(finite, [25, 75])
    return QuartileThresholds(q1=float(q1), q3=float(q3), feature_name=feature_name)


def classify_level(value: Optional[float], thresholds: QuartileThresholds) -> str:
    """Low below Q1, High above Q3, Normal inside the inclusive IQR or absent."""
    if value is None:
        return LEVEL_NORMAL
    if value < thresholds.q1:
        return LEVEL_LOW
    if value > thresholds.q3:
        return LEVEL_HIGH
    return LEVEL_NORMAL


def compute_speech_rate(transcript: Sequence[TimedWord], window: TimeWindow) -> str:
    """Words-per-minute string for words whose midpoint lies in the window."""
    if window.duration_s <= 0:
        raise ZeroDurationWindow(f"window [{window.start_s}, {window.end_s})")
    count = sum(1 for w in transcript
                if window.start_s <= (w.start_s + w.end_s) / 2 < window.end_s)
    rate = count * 60.0 / window.duration_s
    return f"{rate:.2f} words per minute"


def label_subframes(subframes: Sequence[SubframeFeatures],
                    pitch_thresholds: QuartileThresholds,
                    rms_thresholds: QuartileThresholds,
                    intonation_thresholds: QuartileThresholds,
                    speech_rate_text: str) -> VocalLabelTrack:
    """Render one segment's vocal channel against per-speaker thresholds."""
    return VocalLabelTrack(
        pitch_labels=[classify_level(s.pitch_hz, pitch_thresholds) for s in subframes],
        loudness_labels=[classify_level(s.rms_mean, rms_thresholds) for s in subframes],
        intonation_labels=[classify_level(s.intonation_hz_per_s, intonation_thresholds)
                           for s in subframes],
        speech_rate_text=speech_rate_text,
    )
