/** Thin typed client for the session service. Every datum the UI shows
 * originates from one of these calls. */

import type {
  BaselineResponse,
  EvaluateResponse,
  FeedbackAck,
  FeedbackRequest,
  ObjectiveName,
  ParetoResponse,
  RulesetDetail,
  SampleResponse,
  SessionInfo,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`API error ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.base + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  listSessions(): Promise<SessionInfo[]> {
    return this.request("/session");
  }

  createSession(datasetPath: string, seed: number): Promise<{ session_id: string }> {
    return this.post("/session", { dataset_path: datasetPath, seed });
  }

  start(sessionId: string): Promise<{ state: string }> {
    return this.post(`/session/${sessionId}/start`);
  }

  pause(sessionId: string): Promise<{ state: string }> {
    return this.post(`/session/${sessionId}/pause`);
  }

  stop(sessionId: string): Promise<{ state: string }> {
    return this.post(`/session/${sessionId}/stop`);
  }

  pareto(sessionId: string, x: ObjectiveName, y: ObjectiveName): Promise<ParetoResponse> {
    const params = new URLSearchParams({ x, y });
    return this.request(`/session/${sessionId}/pareto?${params}`);
  }

  ruleset(sessionId: string, rulesetId: string): Promise<RulesetDetail> {
    return this.request(`/session/${sessionId}/ruleset/${rulesetId}`);
  }

  feedback(sessionId: string, command: FeedbackRequest): Promise<FeedbackAck> {
    return this.post(`/session/${sessionId}/feedback`, command);
  }

  sample(sessionId: string, rulesetId: string, n: number): Promise<SampleResponse> {
    const params = new URLSearchParams({ ruleset: rulesetId, n: String(n) });
    return this.request(`/session/${sessionId}/sample?${params}`);
  }

  evaluate(
    sessionId: string,
    rulesetText: string,
    datasetPath?: string,
  ): Promise<EvaluateResponse> {
    return this.post(`/session/${sessionId}/evaluate`, {
      ruleset_text: rulesetText,
      dataset_path: datasetPath,
    });
  }

  baseline(sessionId: string, share: number, seeds: number): Promise<BaselineResponse> {
    const params = new URLSearchParams({ share: String(share), seeds: String(seeds) });
    return this.request(`/session/${sessionId}/baseline?${params}`);
  }
}
