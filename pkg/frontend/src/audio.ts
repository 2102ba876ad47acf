// Press-to-talk capture: raw PCM via an AudioContext tap, encoded as WAV
// on release.

import { encodeWav } from "./wav.js";

export type Recorder = {
  stop(): Promise<Blob>;
};

export async function startRecording(): Promise<Recorder> {
  const stream = await navigator.mediaDevices.getUserMedia({ audio: true });
  const context = new AudioContext();
  const source = context.createMediaStreamSource(stream);
  const tap = context.createScriptProcessor(4096, 1, 1);
  const chunks: Float32Array[] = [];

  tap.onaudioprocess = (event) => {
    chunks.push(new Float32Array(event.inputBuffer.getChannelData(0)));
  };
  source.connect(tap);
  tap.connect(context.destination);

  return {
    async stop(): Promise<Blob> {
      tap.disconnect();
      source.disconnect();
      for (const track of stream.getTracks()) track.stop();
      const sampleRate = context.sampleRate;
      await context.close();

      const total = chunks.reduce((n, chunk) => n + chunk.length, 0);
      const samples = new Float32Array(total);
      let at = 0;
      for (const chunk of chunks) {
        samples.set(chunk, at);
        at += chunk.length;
      }
      return encodeWav(samples, sampleRate);
    },
  };
}
