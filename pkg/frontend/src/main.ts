// App wiring: webcam -> GPU shader -> canvas, intent entry (typed or
// spoken), live job progress over SSE, and the saved-shader gallery.

import { ApiError, makeApi, type JobSnapshot, type ShaderSummary } from "./api.js";
import { startRecording, type Recorder } from "./audio.js";
import { GlPipeline } from "./gl.js";
import { fetchLibraryShaders, parityCheck } from "./parity.js";
import { subscribeJob } from "./sse.js";
import {
  Store,
  afterDelete,
  applyShader,
  canSubmit,
  withCamera,
  withGallery,
  withJob,
  withNotice,
} from "./state.js";
import { CARD_SIZE, makeTestCard } from "./testcard.js";

const PASSTHROUGH = `precision mediump float;
uniform sampler2D uMainTex;
varying vec2 vUv;
void main() {
    gl_FragColor = texture2D(uMainTex, vUv);
}
`;

const api = makeApi();
const store = new Store();

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const canvas = $("view") as unknown as HTMLCanvasElement;
const video = document.createElement("video");
video.muted = true;
video.playsInline = true;

const intentInput = $("intent") as unknown as HTMLInputElement;
const submitButton = $("submit") as unknown as HTMLButtonElement;
const talkButton = $("talk") as unknown as HTMLButtonElement;
const statusLine = $("status-line");
const diagnosticsPanel = $("diagnostics");
const galleryList = $("gallery");
const noticeBar = $("notice");
const parityButton = $("parity") as unknown as HTMLButtonElement;
const parityOut = $("parity-out");

const pipeline = new GlPipeline(canvas);
pipeline.useShader(PASSTHROUGH);

let cameraReady = false;

async function startCamera(): Promise<void> {
  try {
    const stream = await navigator.mediaDevices.getUserMedia({
      video: { width: 1280, height: 720 },
    });
    video.srcObject = stream;
    await video.play();
    cameraReady = true;
    store.update((s) => withCamera(s, "on"));
  } catch {
    store.update((s) => withCamera(s, "denied"));
  }
}

// Falls back to the animated test card when the camera is unavailable, so
// the whole loop still demos.
const fallback = document.createElement("canvas");
fallback.width = CARD_SIZE;
fallback.height = CARD_SIZE;
fallback.getContext("2d")!.putImageData(new ImageData(makeTestCard(), CARD_SIZE, CARD_SIZE), 0, 0);

function frameSource(): TexImageSource {
  if (cameraReady && video.readyState >= 2) {
    canvas.width = video.videoWidth || canvas.width;
    canvas.height = video.videoHeight || canvas.height;
    return video;
  }
  canvas.width = 512;
  canvas.height = 512;
  return fallback;
}

function renderLoop(): void {
  const active = store.get().activeShader;
  const time = active ? (performance.now() - active.appliedAt) / 1000 : 0;
  try {
    pipeline.uploadFrame(frameSource());
    pipeline.render(time);
  } catch {
    // a dropped frame is fine; keep the loop alive
  }
  requestAnimationFrame(renderLoop);
}

function applyValidatedSource(source: string, id: string | null): void {
  try {
    pipeline.useShader(source);
    store.update((s) => applyShader(s, { source, id, origin: "artifact" }, performance.now()));
  } catch (err) {
    // should be impossible for validated source; keep the previous shader
    const log = err instanceof Error ? err.message : String(err);
    store.update((s) => withNotice(s, `GPU rejected a validated shader: ${log}`));
  }
}

async function refreshGallery(): Promise<void> {
  const gallery = await api.listShaders();
  store.update((s) => withGallery(s, gallery));
}

async function submitIntent(intent: string): Promise<void> {
  if (!intent.trim()) {
    store.update((s) => withNotice(s, "type what you want to see first"));
    return;
  }
  if (!canSubmit(store.get())) return; // one generation at a time
  store.update((s) => withNotice(s, null));
  try {
    const jobId = await api.generate(intent.trim());
    subscribeJob(jobId, onJobSnapshot);
  } catch (err) {
    const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    store.update((s) => withNotice(s, message));
  }
}

function onJobSnapshot(snapshot: JobSnapshot): void {
  store.update((s) => withJob(s, snapshot));
  if (snapshot.status === "done" && snapshot.artifact_id) {
    void (async () => {
      const artifact = await api.getShader(snapshot.artifact_id!);
      applyValidatedSource(artifact.source, artifact.id);
      await refreshGallery();
    })();
  }
}

// -- gallery --

let previewBackup: { source: string; id: string | null } | null = null;

function galleryCard(entry: ShaderSummary): HTMLElement {
  const card = document.createElement("div");
  card.className = "card";
  const title = document.createElement("span");
  title.textContent = entry.title;
  title.className = "card-title";
  const badge = document.createElement("span");
  badge.textContent = entry.saved ? "saved" : "";
  badge.className = "badge";

  const applyButton = document.createElement("button");
  applyButton.textContent = "apply";
  applyButton.onclick = async () => {
    const artifact = await api.getShader(entry.id);
    applyValidatedSource(artifact.source, artifact.id);
  };

  const saveButton = document.createElement("button");
  saveButton.textContent = entry.saved ? "saved" : "save";
  saveButton.disabled = entry.saved;
  saveButton.onclick = async () => {
    await api.saveShader(entry.id);
    await refreshGallery();
  };

  const deleteButton = document.createElement("button");
  deleteButton.textContent = "delete";
  deleteButton.onclick = async () => {
    await api.deleteShader(entry.id);
    store.update((s) => afterDelete(s, entry.id));
    if (!store.get().activeShader) applyValidatedSource(PASSTHROUGH, null);
    await refreshGallery();
  };

  card.onmouseenter = async () => {
    const active = store.get().activeShader;
    previewBackup = active ? { source: active.source, id: active.id } : null;
    const artifact = await api.getShader(entry.id);
    applyValidatedSource(artifact.source, artifact.id);
  };
  card.onmouseleave = () => {
    if (previewBackup) applyValidatedSource(previewBackup.source, previewBackup.id);
    else applyValidatedSource(PASSTHROUGH, null);
    previewBackup = null;
  };

  card.append(title, badge, applyButton, saveButton, deleteButton);
  return card;
}

// -- rendering state to the DOM --

store.subscribe((state) => {
  const job = state.job;
  if (!job) {
    statusLine.textContent = "idle";
  } else {
    const attempt = job.status === "done" || job.status === "failed"
      ? ` (attempts: ${job.attempt})`
      : ` (attempt ${job.attempt}/${job.max_attempts})`;
    statusLine.textContent = `${job.status}${attempt}`;
    statusLine.dataset.status = job.status;
  }
  submitButton.disabled = !canSubmit(state);

  diagnosticsPanel.textContent = state.lastDiagnostics
    .map((d) => `line ${d.line}, col ${d.col}: [${d.code}] ${d.message}`)
    .join("\n");

  noticeBar.textContent = state.notice ?? "";
  noticeBar.hidden = !state.notice;

  galleryList.replaceChildren(
    ...(state.gallery.length
      ? state.gallery.map(galleryCard)
      : [Object.assign(document.createElement("p"), {
          textContent: "nothing saved yet; generate something",
          className: "empty",
        })]),
  );
});

// -- controls --

submitButton.onclick = () => void submitIntent(intentInput.value);
intentInput.onkeydown = (event) => {
  if (event.key === "Enter") void submitIntent(intentInput.value);
};

let recorder: Recorder | null = null;
talkButton.onmousedown = async () => {
  try {
    recorder = await startRecording();
    talkButton.classList.add("recording");
  } catch {
    store.update((s) => withNotice(s, "microphone unavailable; type instead"));
  }
};
talkButton.onmouseup = async () => {
  if (!recorder) return;
  talkButton.classList.remove("recording");
  const wav = await recorder.stop();
  recorder = null;
  try {
    const text = await api.transcribe(wav);
    intentInput.value = text;
    await submitIntent(text);
  } catch (err) {
    const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    store.update((s) => withNotice(s, `transcription failed; ${message}`));
  }
};

parityButton.onclick = async () => {
  parityOut.textContent = "running parity check...";
  try {
    const shaders = await fetchLibraryShaders();
    const results = await parityCheck(api, shaders, 0);
    parityOut.textContent = results
      .map((r) => `${r.name}: max channel delta ${r.maxDelta}/255 ${r.maxDelta <= 2 ? "OK" : "FAIL"}`)
      .join("\n");
  } catch (err) {
    parityOut.textContent = `parity check failed: ${String(err)}`;
  }
};

void startCamera();
void refreshGallery();
requestAnimationFrame(renderLoop);
