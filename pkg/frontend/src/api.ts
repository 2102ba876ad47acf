// Typed client for the shader service; every non-2xx body is the fixed
// {status, code, message} error shape.

export type Diagnostic = {
  code: string;
  message: string;
  line: number;
  col: number;
  severity: string;
};

export type JobSnapshot = {
  id: string;
  intent: string;
  status: "pending" | "generating" | "validating" | "repairing" | "done" | "failed";
  attempt: number;
  max_attempts: number;
  diagnostics: Diagnostic[];
  timings: Record<string, number>;
  artifact_id: string | null;
  error: string | null;
};

export type ShaderSummary = {
  id: string;
  title: string;
  created_at: string;
  saved: boolean;
};

export type ShaderRecord = ShaderSummary & {
  intent: string;
  attempts_used: number;
  source: string;
};

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function request<T>(fetchFn: FetchLike, url: string, init?: RequestInit): Promise<T> {
  const response = await fetchFn(url, init);
  if (!response.ok) {
    let code = "error";
    let message = response.statusText;
    try {
      const body = (await response.json()) as { code?: string; message?: string };
      code = body.code ?? code;
      message = body.message ?? message;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export function makeApi(fetchFn: FetchLike = (...args) => fetch(...args), base = "") {
  return {
    async generate(intent: string): Promise<string> {
      const body = await request<{ job_id: string }>(fetchFn, `${base}/api/generate`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ intent }),
      });
      return body.job_id;
    },

    getJob(jobId: string): Promise<JobSnapshot> {
      return request(fetchFn, `${base}/api/jobs/${jobId}`);
    },

    async listShaders(): Promise<ShaderSummary[]> {
      const body = await request<{ shaders: ShaderSummary[] }>(
        fetchFn,
        `${base}/api/shaders`,
      );
      return body.shaders;
    },

    getShader(id: string): Promise<ShaderRecord> {
      return request(fetchFn, `${base}/api/shaders/${id}`);
    },

    async saveShader(id: string): Promise<void> {
      await request(fetchFn, `${base}/api/shaders/${id}/save`, { method: "POST" });
    },

    async deleteShader(id: string): Promise<void> {
      await request(fetchFn, `${base}/api/shaders/${id}`, { method: "DELETE" });
    },

    async validate(source: string): Promise<Diagnostic[]> {
      const body = await request<{ diagnostics: Diagnostic[] }>(
        fetchFn,
        `${base}/api/validate`,
        {
          method: "POST",
          headers: { "content-type": "application/json" },
          body: JSON.stringify({ source }),
        },
      );
      return body.diagnostics;
    },

    async renderOnServer(source: string, image: Blob, time: number): Promise<Blob> {
      const form = new FormData();
      form.append("source", source);
      form.append("time", String(time));
      form.append("image", image, "frame.png");
      const response = await fetchFn(`${base}/api/render`, { method: "POST", body: form });
      if (!response.ok) {
        const body = (await response.json()) as { code?: string; message?: string };
        throw new ApiError(response.status, body.code ?? "error", body.message ?? "");
      }
      return response.blob();
    },

    async transcribe(audio: Blob): Promise<string> {
      const form = new FormData();
      form.append("audio", audio, "speech.wav");
      const body = await request<{ text: string }>(fetchFn, `${base}/api/transcribe`, {
        method: "POST",
        body: form,
      });
      return body.text;
    },
  };
}

export type Api = ReturnType<typeof makeApi>;
