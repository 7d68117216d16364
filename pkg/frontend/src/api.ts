/** HTTP client for the session service. One base URL is the only config. */

import type { QueryOp, Restrict, Service, SessionInfo } from "./types.js";

export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function post(url: string, body: unknown): Promise<unknown> {
  const res = await fetch(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!res.ok) {
    let message = `${res.status}`;
    try {
      const detail = (await res.json()).detail;
      if (detail?.message) {
        message =
          detail.line != null
            ? `${detail.line}:${detail.col}: ${detail.message}`
            : detail.message;
      }
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ServiceError(message, res.status);
  }
  return res.json();
}

export class HttpService implements Service {
  constructor(readonly baseUrl: string) {}

  async createSession(
    source: string,
    datasets: Record<string, unknown>,
  ): Promise<SessionInfo> {
    return (await post(`${this.baseUrl}/sessions`, {
      source,
      datasets,
    })) as SessionInfo;
  }

  async query(
    sessionId: string,
    op: QueryOp,
    selection: number[],
    restrict: Restrict,
  ): Promise<number[]> {
    const out = (await post(`${this.baseUrl}/sessions/${sessionId}/query`, {
      op,
      selection,
      restrict,
    })) as { selection: number[] };
    return out.selection;
  }
}
