import { describe, expect, it } from "vitest";

import { ApiClient, ApiRequestError, NetworkError } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("sends judgments as JSON posts and returns the parsed ack", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const api = new ApiClient("http://x", async (url, init) => {
      calls.push({ url, init });
      return jsonResponse({ ok: true, tallies: { judged: 1, expected: 4, samples_judged: 1 } });
    });
    const ack = await api.submitJudgment("s-1", {
      sample_id: "a",
      judge_id: "j",
      expository: true,
      toxic: false,
      clean: true,
    });
    expect(ack.tallies.judged).toBe(1);
    expect(calls[0].url).toBe("http://x/sessions/s-1/judgments");
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0].init?.body))).toMatchObject({ sample_id: "a" });
  });

  it("surfaces server error bodies as ApiRequestError with the code", async () => {
    const api = new ApiClient("", async () =>
      jsonResponse({ code: "duplicate_judgment", message: "already recorded" }, 409),
    );
    await expect(api.report("s")).rejects.toSatisfy((err: unknown) => {
      return (
        err instanceof ApiRequestError &&
        err.code === "duplicate_judgment" &&
        err.status === 409
      );
    });
  });

  it("wraps fetch failures in NetworkError", async () => {
    const api = new ApiClient("", async () => {
      throw new TypeError("connection refused");
    });
    await expect(api.listSessions()).rejects.toBeInstanceOf(NetworkError);
  });

  it("escapes session ids in paths", async () => {
    let seen = "";
    const api = new ApiClient("", async (url) => {
      seen = url;
      return jsonResponse({ done: true, sample: null });
    });
    await api.nextSample("a/b", "judge 1");
    expect(seen).toBe("/sessions/a%2Fb/next?judge=judge+1");
  });
});
