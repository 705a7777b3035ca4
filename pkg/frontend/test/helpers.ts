import * as fs from "node:fs";
import * as path from "node:path";

/** Serialize mono float samples in [-1, 1] as a 16-bit PCM WAV buffer. */
export function wavBytes(samples: number[] | Float64Array, rate: number, channels = 1): Buffer {
  const n = samples.length;
  const data = Buffer.alloc(n * 2 * channels);
  for (let i = 0; i < n; i++) {
    const v = Math.round(Math.max(-1, Math.min(1, samples[i] as number)) * 32767);
    for (let c = 0; c < channels; c++) data.writeInt16LE(v, (i * channels + c) * 2);
  }
  const blockAlign = 2 * channels;
  const fmt = Buffer.alloc(16);
  fmt.writeUInt16LE(1, 0);
  fmt.writeUInt16LE(channels, 2);
  fmt.writeUInt32LE(rate, 4);
  fmt.writeUInt32LE(rate * blockAlign, 8);
  fmt.writeUInt16LE(blockAlign, 12);
  fmt.writeUInt16LE(16, 14);
  const chunks = Buffer.concat([
    Buffer.from("fmt "),
    uint32(fmt.length),
    fmt,
    Buffer.from("data"),
    uint32(data.length),
    data,
  ]);
  return Buffer.concat([Buffer.from("RIFF"), uint32(4 + chunks.length), Buffer.from("WAVE"), chunks]);
}

function uint32(v: number): Buffer {
  const b = Buffer.alloc(4);
  b.writeUInt32LE(v);
  return b;
}

export function sine(freq: number, durationS: number, rate: number, amplitude = 1.0): Float64Array {
  const out = new Float64Array(Math.round(durationS * rate));
  for (let i = 0; i < out.length; i++) out[i] = amplitude * Math.sin((2 * Math.PI * freq * i) / rate);
  return out;
}

/** Tone bursts separated by silence: burstS on, gapS off, repeated. */
export function burstSignal(durationS: number, rate: number, burstS = 0.3, gapS = 0.2): Float64Array {
  const out = new Float64Array(Math.round(durationS * rate));
  const period = burstS + gapS;
  for (let i = 0; i < out.length; i++) {
    const t = i / rate;
    if (t % period < burstS) out[i] = 0.6 * Math.sin(2 * Math.PI * 180 * t);
  }
  return out;
}

export function writeClip(
  dir: string,
  name: string,
  opts: { audio?: Float64Array; rate?: number; video?: object | null },
): string {
  const descriptor: Record<string, unknown> = {};
  if (opts.audio) {
    const wavPath = path.join(dir, `${name}.wav`);
    fs.writeFileSync(wavPath, wavBytes(opts.audio, opts.rate ?? 16000));
    descriptor.audio_wav = `${name}.wav`;
  }
  if (opts.video) descriptor.video = opts.video;
  const clipPath = path.join(dir, `${name}.clip.json`);
  fs.writeFileSync(clipPath, JSON.stringify(descriptor));
  return clipPath;
}
