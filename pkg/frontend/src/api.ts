/** Thin client for the teaching service's versioned resource API. */

import type { BoardView, CreateSessionOptions, MoveJson } from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.code = code;
    this.status = status;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "bad-request";
  let message = `request failed with status ${response.status}`;
  try {
    const body = await response.json();
    if (body && body.detail && typeof body.detail === "object") {
      code = body.detail.code ?? code;
      message = body.detail.message ?? message;
    } else if (body && body.detail) {
      message = String(body.detail);
    }
  } catch {
    /* non-JSON error body; keep the defaults */
  }
  return new ApiError(response.status, code, message);
}

/** What the app needs from the transport; SessionClient is the real one. */
export interface SessionApi {
  createSession(options?: CreateSessionOptions): Promise<BoardView>;
  getState(sessionId: string): Promise<BoardView>;
  submitMove(sessionId: string, move: MoveJson): Promise<BoardView>;
  abortSession(sessionId: string): Promise<BoardView>;
}

export class SessionClient implements SessionApi {
  constructor(private readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}/api/v1${path}`;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.url(path), {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  createSession(options: CreateSessionOptions = {}): Promise<BoardView> {
    return this.request<BoardView>("/sessions", {
      method: "POST",
      body: JSON.stringify(options),
    });
  }

  getState(sessionId: string): Promise<BoardView> {
    return this.request<BoardView>(`/sessions/${sessionId}`);
  }

  submitMove(sessionId: string, move: MoveJson): Promise<BoardView> {
    return this.request<BoardView>(`/sessions/${sessionId}/moves`, {
      method: "POST",
      body: JSON.stringify(move),
    });
  }

  abortSession(sessionId: string): Promise<BoardView> {
    return this.request<BoardView>(`/sessions/${sessionId}`, { method: "DELETE" });
  }

  getReport(sessionId: string): Promise<unknown> {
    return this.request(`/sessions/${sessionId}/report`);
  }
}
