import json
import math
import struct

import numpy as np
import pytest


def wav_bytes(samples, rate, bits=16, channels=1, audio_format=None):
    """Serialize float samples in [-1, 1] to a RIFF WAV byte string."""
    samples = np.asarray(samples, dtype=np.float64)
    if channels > 1 and samples.ndim == 1:
        samples = np.tile(samples[:, None], (1, channels))
    interleaved = samples.reshape(-1) if samples.ndim > 1 else samples

    if audio_format is None:
        audio_format = 1
    if audio_format == 3:
        payload = interleaved.astype("<f4").tobytes()
        bits = 32
    elif bits == 8:
        payload = (np.clip(interleaved, -1, 1) * 127 + 128).astype(np.uint8).tobytes()
    elif bits == 16:
        payload = (np.clip(interleaved, -1, 1) * 32767).astype("<i2").tobytes()
    elif bits == 24:
        ints = (np.clip(interleaved, -1, 1) * ((1 << 23) - 1)).astype(np.int32)
        raw = bytearray()
        for v in ints:
            raw += int(v & 0xFFFFFF).to_bytes(3, "little")
        payload = bytes(raw)
    elif bits == 32:
        payload = (np.clip(interleaved, -1, 1) * ((1 << 31) - 1)).astype("<i4").tobytes()
    else:
        raise ValueError(bits)

    block_align = channels * bits // 8
    fmt = struct.pack("<HHIIHH", audio_format, channels, rate,
                      rate * block_align, block_align, bits)
    chunks = b"fmt " + struct.pack("<I", len(fmt)) + fmt
    chunks += b"data" + struct.pack("<I", len(payload)) + payload
    return b"RIFF" + struct.pack("<I", 4 + len(chunks)) + b"WAVE" + chunks


def write_wav(path, samples, rate, **kwargs):
    path.write_bytes(wav_bytes(samples, rate, **kwargs))
    return path


def sine(freq, duration_s, rate, amplitude=1.0):
    t = np.arange(int(duration_s * rate)) / rate
    return amplitude * np.sin(2 * np.pi * freq * t)


def uniform_words(texts, start_s, end_s):
    """Spread words uniformly over [start_s, end_s)."""
    n = len(texts)
    step = (end_s - start_s) / n
    return [
        {"word": w, "start_s": round(start_s + i * step, 4),
         "end_s": round(start_s + (i + 0.8) * step, 4)}
        for i, w in enumerate(texts)
    ]


REFERENCE_TRANSCRIPT = ("Now, we try to evaluate the trade off inaccuracy and energy "
                   "consumption if we were to use these SLMs in scale instead of "
                   "LLMs.").split()


def landmark_lines(duration_s, fps=30, width=1280, height=720,
                   left_wrist_fn=None, right_wrist_fn=None,
                   expression_fn=None, hands_fn=None,
                   shoulders=((500.0, 200.0), (780.0, 200.0)),
                   hips=((520.0, 450.0), (760.0, 450.0))):
    """Build a landmark JSONL text with programmable wrist trajectories."""
    lines = [json.dumps({"frame_width_px": width, "frame_height_px": height})]
    n = int(duration_s * fps)
    for i in range(n):
        t = i / fps
        lw = left_wrist_fn(t) if left_wrist_fn else (450.0, 400.0)
        rw = right_wrist_fn(t) if right_wrist_fn else (830.0, 400.0)
        hands = hands_fn(t) if hands_fn else {"left_open": True, "right_open": True}
        expression = expression_fn(t) if expression_fn else "neutral"
        lines.append(json.dumps({
            "t_s": round(t, 6),
            "pose": {
                "left_wrist": list(lw) if lw else None,
                "right_wrist": list(rw) if rw else None,
                "left_shoulder": list(shoulders[0]),
                "right_shoulder": list(shoulders[1]),
                "left_hip": list(hips[0]),
                "right_hip": list(hips[1]),
            },
            "hands": hands,
            "expression": expression,
        }))
    return "\n".join(lines) + "\n"


def make_session_files(tmp_path, session_id="s1", duration_s=30.0, seed=0):
    """Write a coherent synthetic session (audio, transcript, landmarks)."""
    rate = 16000
    rng = np.random.default_rng(seed)
    # speech-like audio: tone bursts at varying f0 and level over noise floor
    pieces = []
    t = 0.0
    while t < duration_s:
        f0 = rng.uniform(100, 280)
        amp = rng.uniform(0.2, 0.8)
        seg = sine(f0, 0.5, rate, amplitude=amp)
        pieces.append(seg)
        t += 0.5
    audio = np.concatenate(pieces)[: int(duration_s * rate)]
    audio_path = write_wav(tmp_path / f"{session_id}.wav", audio, rate)

    words = []
    wi = 0
    t = 0.25
    while t < duration_s - 0.5:
        words.append({"word": f"word{wi}", "start_s": round(t, 3), "end_s": round(t + 0.3, 3)})
        wi += 1
        t += rng.uniform(0.3, 0.6)
    transcript_path = tmp_path / f"{session_id}.transcript.json"
    transcript_path.write_text(json.dumps(words))

    def lw(t):
        return (450.0 + 120.0 * math.sin(2 * math.pi * t / 4.0), 400.0 + 80.0 * math.sin(2 * math.pi * t / 5.0))

    def rw(t):
        return (830.0 + 120.0 * math.sin(2 * math.pi * t / 4.0), 400.0 + 80.0 * math.sin(2 * math.pi * t / 5.0 + 0.8))

    landmarks_path = tmp_path / f"{session_id}.landmarks.jsonl"
    landmarks_path.write_text(landmark_lines(duration_s, left_wrist_fn=lw, right_wrist_fn=rw))
    return {"session_id": session_id, "audio": str(audio_path),
            "transcript": str(transcript_path), "landmarks": str(landmarks_path)}


@pytest.fixture
def session_files(tmp_path):
    return make_session_files(tmp_path)
