/** Energy-based speech segmentation for the offline backend.
 *
 * Frames the signal (25 ms window, 10 ms hop), computes RMS per frame, and
 * treats contiguous runs above an adaptive threshold as spoken words. Without
 * a speech-recognition model the lexical content is unknown, so runs are
 * emitted as placeholder tokens; timestamps are real.
 */

import type { TranscriptWord } from "./formats.js";
import type { WavAudio } from "./wav.js";

const WINDOW_S = 0.025;
const HOP_S = 0.01;
const MIN_WORD_S = 0.06;
const THRESHOLD_FRACTION = 0.1;

export function frameRms(audio: WavAudio): { times: number[]; rms: number[] } {
  const win = Math.max(1, Math.round(WINDOW_S * audio.sampleRate));
  const hop = Math.max(1, Math.round(HOP_S * audio.sampleRate));
  const times: number[] = [];
  const rms: number[] = [];
  for (let start = 0; start + win <= audio.samples.length; start += hop) {
    let acc = 0;
    for (let i = start; i < start + win; i++) acc += audio.samples[i] * audio.samples[i];
    times.push((start + win / 2) / audio.sampleRate);
    rms.push(Math.sqrt(acc / win));
  }
  return { times, rms };
}

export function segmentWords(audio: WavAudio): TranscriptWord[] {
  const { times, rms } = frameRms(audio);
  if (rms.length === 0) return [];
  const peak = Math.max(...rms);
  if (peak <= 0) return [];
  const threshold = peak * THRESHOLD_FRACTION;

  const words: TranscriptWord[] = [];
  let runStart = -1;
  const flush = (endIdx: number) => {
    if (runStart < 0) return;
    const start = times[runStart];
    const end = times[endIdx];
    if (end - start >= MIN_WORD_S) {
      words.push({
        word: `w${words.length}`,
        start_s: Number(start.toFixed(4)),
        end_s: Number(end.toFixed(4)),
      });
    }
    runStart = -1;
  };
  for (let i = 0; i < rms.length; i++) {
    if (rms[i] >= threshold) {
      if (runStart < 0) runStart = i;
    } else {
      flush(i - 1);
    }
  }
  flush(rms.length - 1);
  return words;
}
