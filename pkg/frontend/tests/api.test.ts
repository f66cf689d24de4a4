import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

interface Recorded {
  url: string;
  method?: string;
  body?: string;
}

function mockFetch(status: number, payload: unknown, log: Recorded[]) {
  return async (url: string, init?: RequestInit): Promise<Response> => {
    log.push({ url, method: init?.method, body: init?.body as string | undefined });
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
}

describe("ApiClient", () => {
  it("builds urls and encodes path segments", async () => {
    const log: Recorded[] = [];
    const api = new ApiClient("http://x", mockFetch(200, { results: [], latency_ms: 1, mode: "nl_only" }, log));
    await api.search("my pool", { mode: "nl_only", condition: "c" });
    expect(log[0]!.url).toBe("http://x/pools/my%20pool/search");
    expect(JSON.parse(log[0]!.body!)).toEqual({ mode: "nl_only", condition: "c" });
  });

  it("surfaces service error classes", async () => {
    const log: Recorded[] = [];
    const api = new ApiClient(
      "http://x",
      mockFetch(409, { error: "IndexNotReadyError", detail: "not indexed" }, log),
    );
    await expect(api.search("p", { mode: "nl_only", condition: "c" })).rejects.toMatchObject({
      status: 409,
      errorClass: "IndexNotReadyError",
    });
  });

  it("wraps bodies for assistant and process calls", async () => {
    const log: Recorded[] = [];
    const api = new ApiClient(
      "http://x",
      mockFetch(200, { text: "t", detected_intent: "other", extracted: null, reply: "r" }, log),
    );
    await api.assistant("hello");
    expect(log[0]!.url).toBe("http://x/assistant/message");
    expect(JSON.parse(log[0]!.body!)).toEqual({ text: "hello" });
  });

  it("ApiError is an Error with detail as message", () => {
    const err = new ApiError(400, "MissingConditionError", "needs a condition");
    expect(err).toBeInstanceOf(Error);
    expect(err.message).toBe("needs a condition");
  });
});
