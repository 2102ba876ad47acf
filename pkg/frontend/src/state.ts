// Session state and its pure update functions.  The one invariant that
// matters: activeShader only ever holds source that came back from the
// server (a stored artifact or a POST /api/validate pass), never raw
// model output.

import type { Diagnostic, JobSnapshot, ShaderSummary } from "./api.js";

export type CameraState = "off" | "on" | "denied";

export type ActiveShader = {
  source: string;
  id: string | null;
  appliedAt: number; // ms epoch; uTime counts from here
};

export type SessionState = {
  activeShader: ActiveShader | null;
  job: JobSnapshot | null;
  gallery: ShaderSummary[];
  camera: CameraState;
  notice: string | null;
  lastDiagnostics: Diagnostic[];
};

export function initialState(): SessionState {
  return {
    activeShader: null,
    job: null,
    gallery: [],
    camera: "off",
    notice: null,
    lastDiagnostics: [],
  };
}

export function canSubmit(state: SessionState): boolean {
  const status = state.job?.status;
  return status === undefined || status === "done" || status === "failed";
}

export function withJob(state: SessionState, job: JobSnapshot): SessionState {
  const lastDiagnostics = job.diagnostics.length ? job.diagnostics : state.lastDiagnostics;
  return { ...state, job, lastDiagnostics };
}

export type ValidatedSource = {
  source: string;
  id: string | null;
  origin: "artifact" | "validated";
};

export function applyShader(
  state: SessionState,
  shader: ValidatedSource,
  now: number,
): SessionState {
  return {
    ...state,
    activeShader: { source: shader.source, id: shader.id, appliedAt: now },
    notice: null,
  };
}

export function withGallery(state: SessionState, gallery: ShaderSummary[]): SessionState {
  return { ...state, gallery };
}

export function withCamera(state: SessionState, camera: CameraState): SessionState {
  const notice =
    camera === "denied" ? "camera unavailable; falling back to the test card" : state.notice;
  return { ...state, camera, notice };
}

export function withNotice(state: SessionState, notice: string | null): SessionState {
  return { ...state, notice };
}

export function afterDelete(state: SessionState, deletedId: string): SessionState {
  const gallery = state.gallery.filter((entry) => entry.id !== deletedId);
  const active = state.activeShader?.id === deletedId ? null : state.activeShader;
  return { ...state, gallery, activeShader: active };
}

export class Store {
  private state: SessionState = initialState();
  private listeners: Array<(state: SessionState) => void> = [];

  get(): SessionState {
    return this.state;
  }

  update(fn: (state: SessionState) => SessionState): SessionState {
    this.state = fn(this.state);
    for (const listener of this.listeners) listener(this.state);
    return this.state;
  }

  subscribe(listener: (state: SessionState) => void): void {
    this.listeners.push(listener);
  }
}
