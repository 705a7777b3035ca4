/** Clip loading. Two input shapes are accepted:
 *  - a bare .wav file (audio-only clip), or
 *  - a .clip.json descriptor naming an audio file and/or video stream
 *    metadata, with relative paths resolved against the descriptor.
 *
 * Container demuxing (mp4 and friends) belongs to a media backend and is out
 * of scope here; descriptors keep the adapters runnable on extracted streams.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { z } from "zod";

import { readWav, type WavAudio } from "./wav.js";

const DescriptorSchema = z.object({
  audio_wav: z.string().optional(),
  video: z
    .object({
      fps: z.number().positive(),
      frame_width_px: z.number().int().positive(),
      frame_height_px: z.number().int().positive(),
      duration_s: z.number().positive(),
    })
    .optional(),
});

export interface VideoStream {
  fps: number;
  frame_width_px: number;
  frame_height_px: number;
  duration_s: number;
}

export interface Clip {
  sourcePath: string;
  audio: WavAudio | null;
  video: VideoStream | null;
}

export function loadClip(mediaPath: string): Clip {
  if (mediaPath.toLowerCase().endsWith(".wav")) {
    return {
      sourcePath: mediaPath,
      audio: readWav(fs.readFileSync(mediaPath)),
      video: null,
    };
  }
  const raw = DescriptorSchema.parse(JSON.parse(fs.readFileSync(mediaPath, "utf-8")));
  const base = path.dirname(path.resolve(mediaPath));
  let audio: WavAudio | null = null;
  if (raw.audio_wav) {
    const wavPath = path.isAbsolute(raw.audio_wav) ? raw.audio_wav : path.join(base, raw.audio_wav);
    audio = readWav(fs.readFileSync(wavPath));
  }
  return { sourcePath: mediaPath, audio, video: raw.video ?? null };
}
