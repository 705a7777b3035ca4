/** The two adapter operations: clip in, schema-valid file plus manifest out.
 * Output is validated against the format schemas before anything is written,
 * so an emitted file is loadable by the downstream pipeline by construction. */

import * as fs from "node:fs";

import { getBackend } from "./backends.js";
import { loadClip } from "./clip.js";
import { NoAudioStream, NoVideoStream } from "./errors.js";
import { validateLandmarkLines, validateTranscript, type AdapterManifest } from "./formats.js";

function writeManifest(outPath: string, manifest: AdapterManifest): void {
  fs.writeFileSync(`${outPath}.manifest.json`, JSON.stringify(manifest, null, 1) + "\n");
}

export function adaptTranscript(mediaPath: string, outPath: string, backendId = "offline"): AdapterManifest {
  const backend = getBackend(backendId);
  const clip = loadClip(mediaPath);
  if (!clip.audio) throw new NoAudioStream(`${mediaPath} has no audio stream`);
  const words = validateTranscript(backend.transcribe(clip));
  fs.writeFileSync(outPath, JSON.stringify(words, null, 1) + "\n");
  const manifest: AdapterManifest = {
    source_media: mediaPath,
    emitted_files: [outPath],
    models: [backend.info],
    fps: null,
  };
  writeManifest(outPath, manifest);
  return manifest;
}

export function adaptLandmarks(mediaPath: string, outPath: string, backendId = "offline"): AdapterManifest {
  const backend = getBackend(backendId);
  const clip = loadClip(mediaPath);
  if (!clip.video) throw new NoVideoStream(`${mediaPath} has no video stream`);
  const { header, frames } = backend.landmarks(clip);
  const lines = [JSON.stringify(header), ...frames.map((f) => JSON.stringify(f))];
  validateLandmarkLines(lines);
  fs.writeFileSync(outPath, lines.join("\n") + "\n");
  const manifest: AdapterManifest = {
    source_media: mediaPath,
    emitted_files: [outPath],
    models: [backend.info],
    fps: clip.video.fps,
  };
  writeManifest(outPath, manifest);
  return manifest;
}
