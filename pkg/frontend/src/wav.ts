// Client-side WAV (RIFF) encoding so browser recordings upload as plain PCM
// and the server stays codec-free.

function writeHeader(
  view: DataView,
  byteLength: number,
  sampleRate: number,
  channels: number,
  bitsPerSample: number,
  formatCode: number,
): void {
  const blockAlign = channels * (bitsPerSample / 8);
  view.setUint32(0, 0x52494646, false); // 'RIFF'
  view.setUint32(4, 36 + byteLength, true);
  view.setUint32(8, 0x57415645, false); // 'WAVE'
  view.setUint32(12, 0x666d7420, false); // 'fmt '
  view.setUint32(16, 16, true);
  view.setUint16(20, formatCode, true);
  view.setUint16(22, channels, true);
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * blockAlign, true);
  view.setUint16(32, blockAlign, true);
  view.setUint16(34, bitsPerSample, true);
  view.setUint32(36, 0x64617461, false); // 'data'
  view.setUint32(40, byteLength, true);
}

/** Interleaved float samples -> 16-bit PCM WAV. */
export function encodeWav16(samples: Float32Array, sampleRate: number, channels = 1): Uint8Array {
  const out = new Uint8Array(44 + samples.length * 2);
  const view = new DataView(out.buffer);
  writeHeader(view, samples.length * 2, sampleRate, channels, 16, 1);
  for (let i = 0; i < samples.length; i++) {
    const v = Math.max(-32768, Math.min(32767, Math.round(samples[i] * 32768)));
    view.setInt16(44 + i * 2, v, true);
  }
  return out;
}

/** Interleaved float samples -> IEEE float32 WAV (lossless upload). */
export function encodeWavFloat32(
  samples: Float32Array,
  sampleRate: number,
  channels = 1,
): Uint8Array {
  const out = new Uint8Array(44 + samples.length * 4);
  const view = new DataView(out.buffer);
  writeHeader(view, samples.length * 4, sampleRate, channels, 32, 3);
  for (let i = 0; i < samples.length; i++) {
    view.setFloat32(44 + i * 4, samples[i], true);
  }
  return out;
}

/** Minimal decoder for the files this app itself produces (used in tests
 * and for local round-trips; the server is the decoder of record). */
export function decodeWav(bytes: Uint8Array): {
  samples: Float32Array;
  sampleRate: number;
  channels: number;
} {
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  if (view.getUint32(0, false) !== 0x52494646 || view.getUint32(8, false) !== 0x57415645) {
    throw new Error("not a RIFF/WAVE file");
  }
  let pos = 12;
  let format = 0;
  let channels = 0;
  let sampleRate = 0;
  let bits = 0;
  let data: Uint8Array | null = null;
  while (pos + 8 <= bytes.byteLength) {
    const id = view.getUint32(pos, false);
    const size = view.getUint32(pos + 4, true);
    if (id === 0x666d7420) {
      format = view.getUint16(pos + 8, true);
      channels = view.getUint16(pos + 10, true);
      sampleRate = view.getUint32(pos + 12, true);
      bits = view.getUint16(pos + 22, true);
    } else if (id === 0x64617461) {
      data = bytes.subarray(pos + 8, pos + 8 + size);
    }
    pos += 8 + size + (size % 2);
  }
  if (!data || !channels) {
    throw new Error("missing fmt or data chunk");
  }
  let samples: Float32Array;
  if (format === 3 && bits === 32) {
    samples = new Float32Array(data.length / 4);
    const dv = new DataView(data.buffer, data.byteOffset, data.byteLength);
    for (let i = 0; i < samples.length; i++) {
      samples[i] = dv.getFloat32(i * 4, true);
    }
  } else if (format === 1 && bits === 16) {
    samples = new Float32Array(data.length / 2);
    const dv = new DataView(data.buffer, data.byteOffset, data.byteLength);
    for (let i = 0; i < samples.length; i++) {
      samples[i] = dv.getInt16(i * 2, true) / 32768;
    }
  } else {
    throw new Error(`unsupported wav encoding: format ${format}, ${bits} bits`);
  }
  return { samples, sampleRate, channels };
}
