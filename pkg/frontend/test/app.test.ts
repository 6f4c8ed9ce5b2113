import { describe, expect, it } from "vitest";

import { createApp, parseRoute } from "../src/app.js";
import { createClient } from "../src/client.js";
import { container, dashboardPayload, fetchQueue, flush, jsonResponse } from "./helpers.js";

describe("routing", () => {
  it("maps hashes to routes", () => {
    expect(parseRoute("")).toEqual({ view: "dashboard" });
    expect(parseRoute("#/")).toEqual({ view: "dashboard" });
    expect(parseRoute("#/rankings")).toEqual({ view: "rankings" });
    expect(parseRoute("#/labeling")).toEqual({ view: "labeling" });
    expect(parseRoute("#/entity/reviewer/alice")).toEqual({
      view: "entity",
      kind: "reviewer",
      id: "alice",
    });
    expect(parseRoute("#/entity/project/a%2Fb")).toEqual({
      view: "entity",
      kind: "project",
      id: "a/b",
    });
    // anything malformed falls back to the landing page
    expect(parseRoute("#/entity/volcano/x")).toEqual({ view: "dashboard" });
    expect(parseRoute("#/nope")).toEqual({ view: "dashboard" });
  });

  it("mounts the dashboard for the default route", async () => {
    window.location.hash = "";
    const root = container();
    const app = createApp(root, createClient({ fetchImpl: fetchQueue(jsonResponse(dashboardPayload())) }));
    app.route();
    await flush();

    expect(root.querySelector("#topnav")).not.toBeNull();
    expect(root.querySelector("#best-reviewer")?.textContent).toContain("alice");
  });
});
