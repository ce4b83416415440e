import type {
  Ack,
  ApiErrorBody,
  CreateSessionRequest,
  JudgmentPayload,
  NextResponse,
  Report,
  SessionSummary,
} from "./types.js";

/** The server rejected the request and told us why. */
export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail?: unknown,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

/** The server could not be reached at all; safe to retry. */
export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`server unreachable: ${String(cause)}`);
    this.name = "NetworkError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (cause) {
      throw new NetworkError(cause);
    }
    const body = (await response.json().catch(() => null)) as unknown;
    if (!response.ok) {
      const err = (body ?? {}) as Partial<ApiErrorBody>;
      throw new ApiRequestError(
        response.status,
        err.code ?? "http_error",
        err.message ?? `HTTP ${response.status}`,
        err.detail,
      );
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  createSession(request: CreateSessionRequest): Promise<SessionSummary> {
    return this.post("/sessions", request);
  }

  listSessions(): Promise<{ sessions: SessionSummary[] }> {
    return this.request("/sessions");
  }

  getSession(sessionId: string): Promise<SessionSummary> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  nextSample(sessionId: string, judgeId: string): Promise<NextResponse> {
    const query = new URLSearchParams({ judge: judgeId });
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/next?${query}`);
  }

  submitJudgment(sessionId: string, payload: JudgmentPayload): Promise<Ack> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/judgments`, payload);
  }

  report(sessionId: string): Promise<Report> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/report`);
  }
}
