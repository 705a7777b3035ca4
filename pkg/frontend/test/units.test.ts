import { describe, expect, it } from "vitest";

import { mapExpression } from "../src/expression.js";
import { UnknownExpression } from "../src/errors.js";
import { TranscriptSchema } from "../src/formats.js";
import { fingerExtended, handOpen, type FingerLandmarks, type Point2 } from "../src/hands.js";
import { frameRms, segmentWords } from "../src/segment.js";
import { readWav } from "../src/wav.js";
import { burstSignal, sine, wavBytes } from "./helpers.js";

describe("wav reader", () => {
  it("round-trips a 16-bit sine", () => {
    const samples = sine(220, 0.5, 16000, 0.8);
    const audio = readWav(wavBytes(samples, 16000));
    expect(audio.sampleRate).toBe(16000);
    expect(audio.samples.length).toBe(samples.length);
    expect(Math.abs(audio.samples[100] - samples[100])).toBeLessThan(1e-3);
  });

  it("downmixes stereo to mono", () => {
    const samples = sine(220, 0.1, 16000, 0.5);
    const audio = readWav(wavBytes(samples, 16000, 2));
    expect(audio.samples.length).toBe(samples.length);
    expect(Math.abs(audio.samples[50] - samples[50])).toBeLessThan(1e-3);
  });

  it("rejects non-WAV bytes", () => {
    expect(() => readWav(Buffer.from("definitely not audio data"))).toThrow(/RIFF/);
  });
});

describe("energy segmentation", () => {
  it("finds no words in silence", () => {
    const audio = { samples: new Float64Array(16000), sampleRate: 16000 };
    expect(segmentWords(audio)).toEqual([]);
  });

  it("segments tone bursts into timed words", () => {
    const audio = { samples: burstSignal(2.0, 16000), sampleRate: 16000 };
    const words = segmentWords(audio);
    expect(words.length).toBe(4);
    for (const w of words) expect(w.end_s).toBeGreaterThan(w.start_s);
    expect(TranscriptSchema.parse(words)).toBeTruthy();
  });

  it("keeps rms frames aligned with time", () => {
    const audio = { samples: sine(440, 1.0, 16000), sampleRate: 16000 };
    const { times, rms } = frameRms(audio);
    expect(times.length).toBe(rms.length);
    expect(times[0]).toBeGreaterThan(0);
    expect(times[times.length - 1]).toBeLessThan(1.0);
  });
});

function fingers(wrist: Point2, tipRadii: number[]): FingerLandmarks[] {
  return tipRadii.map((tipR, f) => {
    const angle = (-60 + 40 * f) * (Math.PI / 180);
    return {
      middleJoint: [wrist[0] + 40 * Math.sin(angle), wrist[1] - 40 * Math.cos(angle)],
      tip: [wrist[0] + tipR * Math.sin(angle), wrist[1] - tipR * Math.cos(angle)],
    };
  });
}

describe("hand openness curl rule", () => {
  const wrist: Point2 = [100, 300];

  it("extended finger has tip beyond its middle joint", () => {
    expect(fingerExtended(wrist, fingers(wrist, [70])[0])).toBe(true);
    expect(fingerExtended(wrist, fingers(wrist, [25])[0])).toBe(false);
  });

  it("fully open and fully curled hands", () => {
    expect(handOpen(wrist, fingers(wrist, [70, 70, 70, 70]))).toBe(true);
    expect(handOpen(wrist, fingers(wrist, [25, 25, 25, 25]))).toBe(false);
  });

  it("three of four extended fingertips is the boundary", () => {
    expect(handOpen(wrist, fingers(wrist, [70, 70, 70, 25]))).toBe(true);
    expect(handOpen(wrist, fingers(wrist, [70, 70, 25, 25]))).toBe(false);
  });
});

describe("expression mapping", () => {
  it("maps model aliases into the closed vocabulary", () => {
    expect(mapExpression("happiness")).toBe("happy");
    expect(mapExpression("Angry")).toBe("anger");
    expect(mapExpression("sadness")).toBe("sad");
    expect(mapExpression("neutral")).toBe("neutral");
    expect(mapExpression("surprised")).toBe("surprise");
  });

  it("rejects labels outside the vocabulary", () => {
    expect(() => mapExpression("contempt")).toThrow(UnknownExpression);
  });
});
