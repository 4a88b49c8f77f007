import { afterEach, describe, expect, test, vi } from "vitest";

import { ApiClient, ApiError, LockedError } from "../src/api";

function mockFetch(status: number, body: unknown) {
  const fn = vi.fn(async (_url: string, _init?: RequestInit) => ({
    ok: status >= 200 && status < 300,
    status,
    statusText: `HTTP ${status}`,
    json: async () => body,
  }));
  vi.stubGlobal("fetch", fn);
  return fn;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  test("GET endpoints hit the right paths", async () => {
    const fn = mockFetch(200, []);
    const client = new ApiClient("http://example");
    await client.outcomes();
    await client.graph("f");
    await client.density("estimates");
    await client.curves("cdf");
    await client.facet("trim", "M");
    await client.universe(3);
    await client.sensitivity();
    const urls = fn.mock.calls.map((c) => c[0]);
    expect(urls).toEqual([
      "http://example/api/outcomes",
      "http://example/api/graph?method=f",
      "http://example/api/density?source=estimates",
      "http://example/api/curves?kind=cdf",
      "http://example/api/facet?d1=trim&d2=M",
      "http://example/api/universe/3?k=5",
      "http://example/api/sensitivity",
    ]);
  });

  test("POST bodies are JSON with the right shape", async () => {
    const fn = mockFetch(200, { uids: [], ratios: [] });
    const client = new ApiClient();
    await client.brush(-1, 1, { M: "raw" });
    await client.prune(0.25);
    await client.inference("null", "stacking");
    const bodies = fn.mock.calls.map((c) => JSON.parse(c[1]?.body as string));
    expect(bodies).toEqual([
      { lo: -1, hi: 1, facet: { M: "raw" } },
      { cutoff: 0.25 },
      { mode: "null", weighting: "stacking" },
    ]);
  });

  test("423 becomes LockedError with the server's detail", async () => {
    mockFetch(423, { detail: "session is locked" });
    const client = new ApiClient();
    const err = await client.outcomes().catch((e) => e);
    expect(err).toBeInstanceOf(LockedError);
    expect(err.status).toBe(423);
    expect(err.message).toBe("session is locked");
  });

  test("other failures become ApiError, not LockedError", async () => {
    mockFetch(400, { detail: "bad cutoff" });
    const client = new ApiClient();
    const err = await client.prune(-1).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err).not.toBeInstanceOf(LockedError);
    expect(err.status).toBe(400);
  });

  test("non-JSON error bodies fall back to the status text", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => ({
        ok: false,
        status: 500,
        statusText: "Internal Server Error",
        json: async () => {
          throw new Error("not json");
        },
      })),
    );
    const client = new ApiClient();
    const err = await client.outcomes().catch((e) => e);
    expect(err.message).toBe("Internal Server Error");
  });
});
