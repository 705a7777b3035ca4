/** Extraction backends. A backend owns the model-specific work: speech
 * recognition for the transcript and pose/face inference for landmarks.
 *
 * The bundled "offline" backend needs no model runtime: word boundaries come
 * from signal energy and landmarks from a deterministic pose driver whose
 * wrist amplitude follows the audio envelope. It exists so the full adapter
 * path (including the finger-curl openness rule and the expression mapping)
 * can run and be tested on any machine; swap in a real backend by registering
 * it under a new id.
 */

import type { Clip } from "./clip.js";
import { ModelUnavailable } from "./errors.js";
import type { LandmarkFrame, LandmarkHeader, ModelInfo, TranscriptWord } from "./formats.js";
import { mapExpression } from "./expression.js";
import { handOpen, type FingerLandmarks, type Point2 } from "./hands.js";
import { frameRms, segmentWords } from "./segment.js";

export interface LandmarkOutput {
  header: LandmarkHeader;
  frames: LandmarkFrame[];
}

export interface ExtractionBackend {
  info: ModelInfo;
  transcribe(clip: Clip): TranscriptWord[];
  landmarks(clip: Clip): LandmarkOutput;
}

/** Open-hand finger geometry around a wrist point, fed through the curl rule
 * so the openness derivation is exercised rather than hard-coded. */
function syntheticFingers(wrist: Point2, curled: boolean): FingerLandmarks[] {
  const fingers: FingerLandmarks[] = [];
  for (let f = 0; f < 4; f++) {
    const angle = (-60 + 40 * f) * (Math.PI / 180);
    const jointR = 40;
    const tipR = curled ? 25 : 70;
    fingers.push({
      middleJoint: [wrist[0] + jointR * Math.sin(angle), wrist[1] - jointR * Math.cos(angle)],
      tip: [wrist[0] + tipR * Math.sin(angle), wrist[1] - tipR * Math.cos(angle)],
    });
  }
  return fingers;
}

const offlineBackend: ExtractionBackend = {
  info: { id: "offline", version: "1" },

  transcribe(clip) {
    return segmentWords(clip.audio!);
  },

  landmarks(clip) {
    const video = clip.video!;
    const w = video.frame_width_px;
    const h = video.frame_height_px;
    const header: LandmarkHeader = { frame_width_px: w, frame_height_px: h };

    // audio envelope resampled per frame; silent clips get a flat envelope
    let envelope: (t: number) => number = () => 0.5;
    if (clip.audio) {
      const { times, rms } = frameRms(clip.audio);
      const peak = Math.max(...rms, 1e-9);
      envelope = (t) => {
        if (times.length === 0) return 0.5;
        let lo = 0;
        for (let i = 0; i < times.length; i++) if (times[i] <= t) lo = i;
        return rms[lo] / peak;
      };
    }

    const shoulders: [Point2, Point2] = [
      [w * 0.39, h * 0.28],
      [w * 0.61, h * 0.28],
    ];
    const hips: [Point2, Point2] = [
      [w * 0.41, h * 0.62],
      [w * 0.59, h * 0.62],
    ];
    const frames: LandmarkFrame[] = [];
    const count = Math.round(video.duration_s * video.fps);
    for (let i = 0; i < count; i++) {
      const t = i / video.fps;
      const amp = 0.05 + 0.1 * envelope(t);
      const lw: Point2 = [
        w * (0.35 + amp * Math.sin((2 * Math.PI * t) / 4)),
        h * (0.55 + amp * Math.sin((2 * Math.PI * t) / 5)),
      ];
      const rw: Point2 = [
        w * (0.65 + amp * Math.sin((2 * Math.PI * t) / 4)),
        h * (0.55 + amp * Math.sin((2 * Math.PI * t) / 5 + 0.8)),
      ];
      frames.push({
        t_s: Number(t.toFixed(6)),
        pose: {
          left_wrist: lw,
          right_wrist: rw,
          left_shoulder: shoulders[0],
          right_shoulder: shoulders[1],
          left_hip: hips[0],
          right_hip: hips[1],
        },
        hands: {
          left_open: handOpen(lw, syntheticFingers(lw, false)),
          right_open: handOpen(rw, syntheticFingers(rw, false)),
        },
        expression: mapExpression("neutral"),
      });
    }
    return { header, frames };
  },
};

const REGISTRY = new Map<string, ExtractionBackend>([[offlineBackend.info.id, offlineBackend]]);

export function getBackend(id: string): ExtractionBackend {
  const backend = REGISTRY.get(id);
  if (!backend) {
    throw new ModelUnavailable(
      `backend '${id}' is not registered (available: ${[...REGISTRY.keys()].join(", ")})`,
    );
  }
  return backend;
}

export function registerBackend(backend: ExtractionBackend): void {
  REGISTRY.set(backend.info.id, backend);
}
