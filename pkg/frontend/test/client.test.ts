import { describe, expect, it } from "vitest";

import { ApiError, createClient } from "../src/client.js";
import { dashboardPayload, fetchQueue, jsonResponse, rankingsPayload } from "./helpers.js";

describe("api client", () => {
  it("builds ranking queries from the given parameters", async () => {
    const fetchImpl = fetchQueue(jsonResponse(rankingsPayload()));
    const client = createClient({ fetchImpl });

    await client.rankings({
      from: "2025-01-01T00:00:00Z",
      to: "2025-02-01T00:00:00Z",
      entity: "reviewer",
      key: "RE",
      offset: 10,
    });

    const url = fetchImpl.mock.calls[0]?.[0] as string;
    expect(url).toContain("/api/rankings?");
    expect(url).toContain("from=2025-01-01T00%3A00%3A00Z");
    expect(url).toContain("to=2025-02-01T00%3A00%3A00Z");
    expect(url).toContain("entity=reviewer");
    expect(url).toContain("key=RE");
    expect(url).toContain("offset=10");
  });

  it("omits the query string entirely when no parameters are set", async () => {
    const fetchImpl = fetchQueue(jsonResponse(dashboardPayload()));
    await createClient({ fetchImpl }).dashboard();
    expect(fetchImpl.mock.calls[0]?.[0]).toBe("/api/dashboard");
  });

  it("escapes entity ids in detail paths", async () => {
    const fetchImpl = fetchQueue(
      jsonResponse({ id: "a/b", kind: "project", buckets: [] }),
    );
    await createClient({ fetchImpl }).timeseries("project", "a/b", 12);
    expect(fetchImpl.mock.calls[0]?.[0]).toBe("/api/entities/project/a%2Fb?months=12");
  });

  it("posts label submissions as JSON", async () => {
    const fetchImpl = fetchQueue(jsonResponse({ ok: true, progress: { labeled: 1, total: 4 } }));
    await createClient({ fetchImpl }).labelingSubmit({
      comment_id: "m7",
      is_useful: true,
      category: "Logical",
    });

    const [url, init] = fetchImpl.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/api/labeling/submit");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual({
      comment_id: "m7",
      is_useful: true,
      category: "Logical",
    });
  });

  it("surfaces the server's detail message on failures", async () => {
    const fetchImpl = fetchQueue(jsonResponse({ detail: "months must be in 1..120" }, 400));
    const attempt = createClient({ fetchImpl }).timeseries("reviewer", "alice", 0);
    await expect(attempt).rejects.toMatchObject({
      name: "ApiError",
      status: 400,
      message: "months must be in 1..120",
    });
  });

  it("falls back to the status line for non-JSON error bodies", async () => {
    const fetchImpl = fetchQueue(
      new Response("<html>boom</html>", { status: 502, statusText: "Bad Gateway" }),
    );
    const attempt = createClient({ fetchImpl }).dashboard();
    await expect(attempt).rejects.toBeInstanceOf(ApiError);
    await expect(createClient({ fetchImpl }).dashboard()).rejects.toThrow("fetch queue drained");
  });
});
