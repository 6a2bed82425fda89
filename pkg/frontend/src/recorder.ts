// Browser microphone capture to WAV. Capture runs through an AudioContext
// so the samples are raw PCM floats; encoding happens client-side and the
// upload is an ordinary WAV file.

import { encodeWavFloat32 } from "./wav.js";

export class MicRecorder {
  private chunks: Float32Array[] = [];
  private context: AudioContext | null = null;
  private source: MediaStreamAudioSourceNode | null = null;
  private processor: ScriptProcessorNode | null = null;
  private stream: MediaStream | null = null;

  get recording(): boolean {
    return this.context !== null;
  }

  async start(): Promise<void> {
    if (this.recording) {
      return;
    }
    this.stream = await navigator.mediaDevices.getUserMedia({ audio: true });
    this.context = new AudioContext();
    this.source = this.context.createMediaStreamSource(this.stream);
    this.processor = this.context.createScriptProcessor(4096, 1, 1);
    this.chunks = [];
    this.processor.onaudioprocess = (event) => {
      this.chunks.push(new Float32Array(event.inputBuffer.getChannelData(0)));
    };
    this.source.connect(this.processor);
    this.processor.connect(this.context.destination);
  }

  async stop(): Promise<{ wav: Uint8Array; sampleRate: number; durationS: number }> {
    if (!this.context || !this.processor || !this.source || !this.stream) {
      throw new Error("not recording");
    }
    const sampleRate = this.context.sampleRate;
    this.processor.disconnect();
    this.source.disconnect();
    this.stream.getTracks().forEach((t) => t.stop());
    await this.context.close();
    this.context = null;

    const total = this.chunks.reduce((n, c) => n + c.length, 0);
    const samples = new Float32Array(total);
    let off = 0;
    for (const chunk of this.chunks) {
      samples.set(chunk, off);
      off += chunk.length;
    }
    this.chunks = [];
    return {
      wav: encodeWavFloat32(samples, sampleRate),
      sampleRate,
      durationS: total / sampleRate,
    };
  }
}
