/**
 * The two file formats the downstream pipeline ingests, expressed as zod
 * schemas so adapter output can be validated before it is written.
 *
 * Transcript: a JSON array of word objects with second-resolution timestamps.
 * Landmarks: JSONL, one header line with frame dimensions followed by one
 * object per video frame with strictly increasing t_s.
 */

import { z } from "zod";

export const EXPRESSIONS = [
  "fear",
  "neutral",
  "disgust",
  "sad",
  "surprise",
  "happy",
  "anger",
] as const;

export const TranscriptWordSchema = z
  .object({
    word: z.string().min(1).regex(/^\S+$/, "word must not contain whitespace"),
    start_s: z.number().nonnegative(),
    end_s: z.number(),
  })
  .refine((w) => w.end_s > w.start_s, { message: "end_s must exceed start_s" });

export const TranscriptSchema = z
  .array(TranscriptWordSchema)
  .refine(
    (words) => words.every((w, i) => i === 0 || w.start_s >= words[i - 1].start_s),
    { message: "start_s must be non-decreasing" },
  );

export type TranscriptWord = z.infer<typeof TranscriptWordSchema>;

const Point = z.tuple([z.number(), z.number()]).nullable();

export const LandmarkHeaderSchema = z.object({
  frame_width_px: z.number().int().positive(),
  frame_height_px: z.number().int().positive(),
});

export const LandmarkFrameSchema = z.object({
  t_s: z.number().nonnegative(),
  pose: z.object({
    left_wrist: Point,
    right_wrist: Point,
    left_shoulder: Point,
    right_shoulder: Point,
    left_hip: Point,
    right_hip: Point,
  }),
  hands: z.object({
    left_open: z.boolean().nullable(),
    right_open: z.boolean().nullable(),
  }),
  expression: z.enum(EXPRESSIONS).nullable(),
});

export type LandmarkHeader = z.infer<typeof LandmarkHeaderSchema>;
export type LandmarkFrame = z.infer<typeof LandmarkFrameSchema>;

export interface ModelInfo {
  id: string;
  version: string;
}

/** Record of one adapter invocation: what ran, on what, and what it wrote. */
export interface AdapterManifest {
  source_media: string;
  emitted_files: string[];
  models: ModelInfo[];
  fps: number | null;
}

export function validateTranscript(words: unknown): TranscriptWord[] {
  return TranscriptSchema.parse(words);
}

export function validateLandmarkLines(lines: string[]): void {
  if (lines.length === 0) throw new Error("landmark file must have a header line");
  LandmarkHeaderSchema.parse(JSON.parse(lines[0]));
  let prev = -Infinity;
  for (const line of lines.slice(1)) {
    const frame = LandmarkFrameSchema.parse(JSON.parse(line));
    if (frame.t_s <= prev) throw new Error(`t_s ${frame.t_s} not strictly increasing`);
    prev = frame.t_s;
  }
}
