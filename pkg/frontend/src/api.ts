/** Thin typed client over the workbench service routes. */

import type {
  ExampleInfo,
  LocateResponse,
  PathDetail,
  PromptResponse,
  RunSnapshot,
  RunStartBody,
  SessionConfig,
  TreeJson,
  VerifyResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    if (typeof body.detail === "string") detail = body.detail;
    else if (body.diagnostics) {
      detail = body.diagnostics
        .map((d: { line: number; col: number; message: string }) => `${d.line}:${d.col}: ${d.message}`)
        .join("; ");
    } else detail = JSON.stringify(body);
  } catch {
    /* keep statusText */
  }
  return new ApiError(resp.status, detail);
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  examples(): Promise<ExampleInfo[]> {
    return this.request("GET", "/examples");
  }

  async createSession(source: string, cfg?: Partial<SessionConfig>): Promise<string> {
    const body: { source: string; cfg?: Partial<SessionConfig> } = { source };
    if (cfg) body.cfg = cfg;
    const out = await this.request<{ sessionId: string }>("POST", "/sessions", body);
    return out.sessionId;
  }

  extract(sessionId: string): Promise<TreeJson> {
    return this.request("POST", `/sessions/${sessionId}/extract`);
  }

  tree(sessionId: string): Promise<TreeJson> {
    return this.request("GET", `/sessions/${sessionId}/tree`);
  }

  pathDetail(sessionId: string, pathId: string): Promise<PathDetail> {
    return this.request("GET", `/sessions/${sessionId}/paths/${pathId}`);
  }

  getPrompt(sessionId: string, pathId: string): Promise<PromptResponse> {
    return this.request("GET", `/sessions/${sessionId}/paths/${pathId}/prompt`);
  }

  savePrompt(sessionId: string, pathId: string, promptText: string): Promise<unknown> {
    return this.request("PUT", `/sessions/${sessionId}/paths/${pathId}/prompt`, { promptText });
  }

  startRun(sessionId: string, body: RunStartBody): Promise<{ runId: string }> {
    return this.request("POST", `/sessions/${sessionId}/runs`, body);
  }

  currentRun(sessionId: string): Promise<RunSnapshot> {
    return this.request("GET", `/sessions/${sessionId}/runs/current`);
  }

  cancelRun(sessionId: string): Promise<{ cancelled: boolean }> {
    return this.request("POST", `/sessions/${sessionId}/runs/current/cancel`);
  }

  verify(sessionId: string, pathId: string, testText: string): Promise<VerifyResponse> {
    return this.request("POST", `/sessions/${sessionId}/paths/${pathId}/verify`, { testText });
  }

  locate(sessionId: string, testText: string): Promise<LocateResponse> {
    return this.request("POST", `/sessions/${sessionId}/locate`, { testText });
  }
}
