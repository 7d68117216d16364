import { afterEach, describe, expect, it, vi } from "vitest";

import { HttpService, ServiceError } from "../src/api.js";

interface CannedResponse {
  ok: boolean;
  status: number;
  body: unknown;
}

interface RecordedCall {
  url: string;
  init: RequestInit;
}

function stubFetch(...queue: CannedResponse[]): RecordedCall[] {
  const calls: RecordedCall[] = [];
  vi.stubGlobal("fetch", async (url: string, init: RequestInit) => {
    calls.push({ url, init });
    const next = queue.shift();
    if (!next) throw new Error("fetch stub exhausted");
    return {
      ok: next.ok,
      status: next.status,
      json: async () => next.body,
    };
  });
  return calls;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

const SESSION_BODY = {
  id: "abc123",
  view: { tables: [], charts: [] },
  inputs: [],
};

describe("createSession", () => {
  it("posts source and datasets as JSON and returns the session", async () => {
    const calls = stubFetch({ ok: true, status: 200, body: SESSION_BODY });
    const service = new HttpService("http://box:8000");
    const session = await service.createSession("let x = 1 in x", {
      data: "emissions\n1.0\n",
    });
    expect(session.id).toBe("abc123");
    expect(calls).toHaveLength(1);
    expect(calls[0]!.url).toBe("http://box:8000/sessions");
    expect(calls[0]!.init.method).toBe("POST");
    expect(calls[0]!.init.headers).toEqual({ "Content-Type": "application/json" });
    expect(JSON.parse(calls[0]!.init.body as string)).toEqual({
      source: "let x = 1 in x",
      datasets: { data: "emissions\n1.0\n" },
    });
  });
});

describe("query", () => {
  it("posts op, selection, and restrict, and unwraps the answer", async () => {
    const calls = stubFetch({
      ok: true,
      status: 200,
      body: { selection: [58, 64] },
    });
    const service = new HttpService("http://box:8000");
    const answer = await service.query("abc123", "demandedBy", [4], "outputs");
    expect(answer).toEqual([58, 64]);
    expect(calls[0]!.url).toBe("http://box:8000/sessions/abc123/query");
    expect(JSON.parse(calls[0]!.init.body as string)).toEqual({
      op: "demandedBy",
      selection: [4],
      restrict: "outputs",
    });
  });
});

describe("error reporting", () => {
  it("folds positioned diagnostics into line:col: message", async () => {
    stubFetch({
      ok: false,
      status: 400,
      body: {
        detail: { message: "expected an expression, found ';'", line: 1, col: 9 },
      },
    });
    const service = new HttpService("http://box:8000");
    const err = await service.createSession("bad ;", {}).catch((e) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect(err.message).toBe("1:9: expected an expression, found ';'");
    expect(err.status).toBe(400);
  });

  it("keeps unpositioned messages as-is", async () => {
    stubFetch({
      ok: false,
      status: 404,
      body: { detail: { message: "no session zzz", line: null, col: null } },
    });
    const service = new HttpService("http://box:8000");
    const err = await service.query("zzz", "demands", [1], "none").catch((e) => e);
    expect(err.message).toBe("no session zzz");
    expect(err.status).toBe(404);
  });

  it("falls back to the bare status when the error body is not parseable", async () => {
    stubFetch({
      ok: false,
      status: 502,
      body: undefined,
    });
    vi.stubGlobal("fetch", async () => ({
      ok: false,
      status: 502,
      json: async () => {
        throw new Error("not json");
      },
    }));
    const service = new HttpService("http://box:8000");
    const err = await service.query("abc", "demands", [1], "none").catch((e) => e);
    expect(err.message).toBe("502");
    expect(err.status).toBe(502);
  });
});
