/** Minimal RIFF/WAV reader: PCM 8/16/24/32-bit and 32-bit float, any channel
 * count (downmixed to mono by averaging). Enough to feed the offline backend;
 * real containers are decoded by whichever media backend is plugged in. */

export interface WavAudio {
  samples: Float64Array;
  sampleRate: number;
}

export function readWav(buf: Buffer): WavAudio {
  if (buf.length < 12 || buf.toString("ascii", 0, 4) !== "RIFF" || buf.toString("ascii", 8, 12) !== "WAVE") {
    throw new Error("not a RIFF/WAVE file");
  }
  let fmt: { format: number; channels: number; rate: number; bits: number } | null = null;
  let data: Buffer | null = null;
  let pos = 12;
  while (pos + 8 <= buf.length) {
    const id = buf.toString("ascii", pos, pos + 4);
    const size = buf.readUInt32LE(pos + 4);
    const body = buf.subarray(pos + 8, pos + 8 + size);
    if (id === "fmt ") {
      fmt = {
        format: body.readUInt16LE(0),
        channels: body.readUInt16LE(2),
        rate: body.readUInt32LE(4),
        bits: body.readUInt16LE(14),
      };
      if (fmt.format === 0xfffe && size >= 26) fmt.format = body.readUInt16LE(24);
    } else if (id === "data") {
      data = body;
    }
    pos += 8 + size + (size % 2);
  }
  if (!fmt || !data) throw new Error("missing fmt or data chunk");
  const { format, channels, rate, bits } = fmt;
  const bytes = bits / 8;
  const frames = Math.floor(data.length / (bytes * channels));
  const samples = new Float64Array(frames);
  for (let i = 0; i < frames; i++) {
    let acc = 0;
    for (let c = 0; c < channels; c++) {
      const off = (i * channels + c) * bytes;
      let v: number;
      if (format === 3 && bits === 32) v = data.readFloatLE(off);
      else if (format === 1 && bits === 8) v = (data.readUInt8(off) - 128) / 128;
      else if (format === 1 && bits === 16) v = data.readInt16LE(off) / 32768;
      else if (format === 1 && bits === 24) {
        const raw = data.readUIntLE(off, 3);
        v = (raw >= 0x800000 ? raw - 0x1000000 : raw) / 0x800000;
      } else if (format === 1 && bits === 32) v = data.readInt32LE(off) / 2147483648;
      else throw new Error(`unsupported WAV format ${format}/${bits}-bit`);
      acc += v;
    }
    samples[i] = acc / channels;
  }
  return { samples, sampleRate: rate };
}
