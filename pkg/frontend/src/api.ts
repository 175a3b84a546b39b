// Thin typed client for the session service REST surface. Every server
// mutation the console performs goes through these calls; nothing else
// touches server state.

import type {
  CloseResult,
  CreateSessionPayload,
  EventResult,
  HealthPayload,
  InteractionRecord,
  MemoryPayload,
  TriggerMode,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = (await res.json()) as { detail?: unknown };
      if (typeof body.detail === "string") {
        detail = body.detail;
      } else if (body.detail !== undefined) {
        detail = JSON.stringify(body.detail);
      }
    } catch {
      // Non-JSON error body; keep the status text.
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

function post<T>(url: string, body: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
}

export interface TriggerArgs {
  mode: TriggerMode;
  voiced_query?: string;
  query_time_ms?: number;
}

export class ApiClient {
  readonly baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  wsUrl(sessionId: string): string {
    const ws = this.baseUrl.replace(/^http/, "ws");
    return `${ws}/sessions/${encodeURIComponent(sessionId)}/stream`;
  }

  health(): Promise<HealthPayload> {
    return request(`${this.baseUrl}/healthz`);
  }

  createSession(sessionId?: string): Promise<CreateSessionPayload> {
    return post(`${this.baseUrl}/sessions`, sessionId ? { session_id: sessionId } : {});
  }

  postEvent(sessionId: string, text: string, speaker?: string): Promise<EventResult> {
    const body: Record<string, unknown> = { text };
    if (speaker) {
      body["speaker"] = speaker;
    }
    return post(`${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/events`, body);
  }

  trigger(sessionId: string, args: TriggerArgs): Promise<InteractionRecord> {
    return post(`${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/trigger`, args);
  }

  closeSession(sessionId: string): Promise<CloseResult> {
    return post(`${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/close`, {});
  }

  interactions(sessionId: string): Promise<InteractionRecord[]> {
    return request<{ interactions: InteractionRecord[] }>(
      `${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/interactions`,
    ).then((body) => body.interactions);
  }

  memory(sessionId: string): Promise<MemoryPayload> {
    return request(`${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/memory`);
  }
}
