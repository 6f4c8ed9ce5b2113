// Canned payloads and a tiny fake-fetch harness shared by the
// component tests.

import { vi } from "vitest";

export const CATEGORIES = [
  "AlternateOutput", "DesignDiscussion", "Documentation", "FalsePositive",
  "Interface", "LargerDefect", "Logical", "NamingConvention",
  "OrganizationOfCode", "Praise", "Question", "Resource",
  "SolutionApproach", "Support", "Timing", "Validation",
  "VisualRepresentation", "Others",
];

export function rankedRow(id: string, rank: number, overrides: Record<string, number> = {}) {
  return {
    id,
    rank,
    NR: 10,
    NC: 20,
    UC: 15,
    CUD: 0.75,
    ID: 1.5,
    RE: 5.0,
    RI: 315,
    NC_score: 30,
    CUD_score: 29,
    review_score: 59,
    ...overrides,
  };
}

export const PERIOD = { from: "2024-12-01T00:00:00Z", to: "2025-02-01T00:00:00Z" };

/** Five reviewers and five projects; a few sentinel values that would
 * change under any client-side rounding or recomputation. */
export function dashboardPayload() {
  return {
    period: PERIOD,
    best_reviewer: { id: "alice", RI: 540 },
    best_project: { id: "gears", useful_pct: 71.54471544715447 },
    useful_pct: 56.666666666666664,
    top5_reviewers: [
      rankedRow("alice", 1, { RI: 540, CUD: 0.6666666666666666 }),
      rankedRow("bob", 2, { RI: 427 }),
      rankedRow("carol", 3, { RI: 336 }),
      rankedRow("dave", 4, { RI: 151 }),
      rankedRow("erin", 5, { RI: 85 }),
    ],
    top5_projects: [
      rankedRow("gears", 1),
      rankedRow("widgets", 2),
      rankedRow("sprockets", 3),
      rankedRow("flanges", 4),
      rankedRow("cogs", 5),
    ],
  };
}

export function emptyDashboardPayload() {
  return {
    period: PERIOD,
    best_reviewer: null,
    best_project: null,
    useful_pct: 0,
    top5_reviewers: [],
    top5_projects: [],
  };
}

export function rankingsPayload(overrides: Partial<Record<string, unknown>> = {}) {
  return {
    period: PERIOD,
    entity: "reviewer",
    key: "RI",
    total: 3,
    offset: 0,
    // deliberately not sorted by RI: the client must keep API order
    rows: [
      rankedRow("carol", 1, { RI: 100 }),
      rankedRow("alice", 2, { RI: 900 }),
      rankedRow("bob", 3, { RI: 500 }),
    ],
    ...overrides,
  };
}

export function pendingLabeling(commentId: string, labeled: number, total: number) {
  return {
    done: false,
    comment: {
      comment_id: commentId,
      text: `Please rename this variable (${commentId})`,
      author_id: "reviewer-9",
      written_at: "2025-01-10T12:00:00Z",
      link: `https://gerrit.example/#/c/${commentId}`,
    },
    categories: CATEGORIES,
    progress: { labeled, total },
  };
}

export function doneLabeling(labeled: number, total: number) {
  return { done: true, comment: null, progress: { labeled, total } };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** fetch stub that pops responses in order; fails loudly when drained. */
export function fetchQueue(...bodies: Array<Response | (() => Response)>) {
  const queue = [...bodies];
  return vi.fn<typeof fetch>(async (): Promise<Response> => {
    const next = queue.shift();
    if (next === undefined) throw new Error("fetch queue drained");
    return typeof next === "function" ? next() : next;
  });
}

/** Let pending promise chains and microtasks settle. */
export async function flush(): Promise<void> {
  for (let i = 0; i < 8; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function container(): HTMLElement {
  const element = document.createElement("div");
  document.body.appendChild(element);
  return element;
}
