import type {
  CreateSessionRequest,
  DuelResponse,
  ErrorBody,
  OutcomeRequest,
  SessionState,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

// The controller and the tests talk to this interface; HttpDuelApi is the
// real transport.
export interface DuelApi {
  createSession(req: CreateSessionRequest): Promise<DuelResponse>;
  getDuel(sessionId: string): Promise<DuelResponse>;
  getSession(sessionId: string): Promise<SessionState>;
  submitOutcome(sessionId: string, req: OutcomeRequest): Promise<DuelResponse>;
}

export function defaultBaseUrl(): string {
  const envBase = (import.meta as { env?: Record<string, string> }).env
    ?.VITE_API_BASE_URL;
  if (envBase) return envBase;
  if (typeof window === "undefined") return "http://localhost:8000";
  const { protocol, hostname, port } = window.location;
  // the vite dev server is not the API; assume the default service port
  if (port === "5173" || port === "4173") {
    return `${protocol}//${hostname}:8000`;
  }
  return `${protocol}//${hostname}${port ? `:${port}` : ""}`;
}

export class HttpDuelApi implements DuelApi {
  private readonly fetchImpl: typeof fetch;

  constructor(
    readonly baseUrl: string = defaultBaseUrl(),
    fetchImpl?: typeof fetch,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!res.ok) {
      let message = `request failed with status ${res.status}`;
      try {
        message = ((await res.json()) as ErrorBody).error;
      } catch {
        // non-JSON error body; keep the status message
      }
      throw new ApiError(res.status, message);
    }
    return (await res.json()) as T;
  }

  createSession(req: CreateSessionRequest): Promise<DuelResponse> {
    return this.request<DuelResponse>("/sessions", {
      method: "POST",
      body: JSON.stringify(req),
    });
  }

  getDuel(sessionId: string): Promise<DuelResponse> {
    return this.request<DuelResponse>(`/sessions/${sessionId}/duel`);
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request<SessionState>(`/sessions/${sessionId}`);
  }

  submitOutcome(sessionId: string, req: OutcomeRequest): Promise<DuelResponse> {
    return this.request<DuelResponse>(`/sessions/${sessionId}/outcome`, {
      method: "POST",
      body: JSON.stringify(req),
    });
  }
}
