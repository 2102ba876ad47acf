// Dev tool: render the standard test card through the GPU pipeline and
// through POST /api/render, and report the worst per-channel difference.
// The two paths share nothing but the shader source, so a small delta is
// strong evidence the GPU output matches the reference renderer.

import type { Api } from "./api.js";
import { GlPipeline } from "./gl.js";
import { CARD_SIZE, makeTestCard } from "./testcard.js";

export type ParityResult = {
  name: string;
  maxDelta: number;
};

export function maxChannelDelta(a: Uint8ClampedArray, b: Uint8ClampedArray): number {
  if (a.length !== b.length) throw new Error("pixel buffers differ in size");
  let worst = 0;
  for (let i = 0; i < a.length; i++) {
    const delta = Math.abs(a[i] - b[i]);
    if (delta > worst) worst = delta;
  }
  return worst;
}

export async function cardPngBlob(): Promise<Blob> {
  const canvas = document.createElement("canvas");
  canvas.width = CARD_SIZE;
  canvas.height = CARD_SIZE;
  const context = canvas.getContext("2d")!;
  context.putImageData(new ImageData(makeTestCard(), CARD_SIZE, CARD_SIZE), 0, 0);
  return new Promise((resolve, reject) => {
    canvas.toBlob((blob) => (blob ? resolve(blob) : reject(new Error("PNG encode failed"))),
      "image/png");
  });
}

export async function decodePngTopDown(blob: Blob): Promise<Uint8ClampedArray> {
  const bitmap = await createImageBitmap(blob);
  const canvas = document.createElement("canvas");
  canvas.width = bitmap.width;
  canvas.height = bitmap.height;
  const context = canvas.getContext("2d")!;
  context.drawImage(bitmap, 0, 0);
  return context.getImageData(0, 0, bitmap.width, bitmap.height).data;
}

export type NamedShader = { name: string; source: string };

/** The library effects bundled with the UI at build time. */
export async function fetchLibraryShaders(
  fetchFn: (url: string) => Promise<Response> = (url) => fetch(url),
): Promise<NamedShader[]> {
  const index = await fetchFn("/effects/index.json");
  if (!index.ok) throw new Error("effect bundle missing; rebuild the frontend");
  const { effects } = (await index.json()) as { effects: string[] };
  return Promise.all(
    effects.map(async (name) => {
      const response = await fetchFn(`/effects/${name}.frag`);
      if (!response.ok) throw new Error(`missing bundled effect ${name}`);
      return { name, source: await response.text() };
    }),
  );
}

export async function parityCheck(
  api: Api,
  shaders: NamedShader[],
  time = 0,
): Promise<ParityResult[]> {
  const card = makeTestCard();
  const cardBlob = await cardPngBlob();

  const canvas = document.createElement("canvas");
  canvas.width = CARD_SIZE;
  canvas.height = CARD_SIZE;
  const pipeline = new GlPipeline(canvas);

  const results: ParityResult[] = [];
  for (const shader of shaders) {
    pipeline.useShader(shader.source);
    pipeline.uploadPixels(CARD_SIZE, CARD_SIZE, card);
    const gpu = pipeline.renderToPixels(CARD_SIZE, CARD_SIZE, time);
    const reference = await decodePngTopDown(
      await api.renderOnServer(shader.source, cardBlob, time),
    );
    results.push({ name: shader.name, maxDelta: maxChannelDelta(gpu, reference) });
  }
  return results;
}
