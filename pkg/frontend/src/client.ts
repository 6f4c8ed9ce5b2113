// Typed client for the reviewlens HTTP API. Every request goes through
// an injected fetch so tests can spy on URLs and feed canned responses;
// the browser entry point passes the real one.

import {
  DashboardSummary,
  EntityKind,
  EntityTimeseries,
  LabelSubmitResult,
  LabelingNext,
  LoginResult,
  MineInterval,
  Period,
  Progress,
  RankingsPage,
  decodeDashboard,
  decodeLabelSubmit,
  decodeLabelingNext,
  decodeLogin,
  decodeMineInterval,
  decodeProgress,
  decodeRankings,
  decodeTimeseries,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  constructor(status: number, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
  }
}

export interface ClientOptions {
  baseUrl?: string;
  fetchImpl?: typeof fetch;
}

export interface RankingsQuery {
  from?: string;
  to?: string;
  entity?: EntityKind;
  key?: string;
  offset?: number;
  limit?: number;
}

export interface LabelSubmission {
  comment_id: string;
  is_useful: boolean;
  category: string;
  overwrite?: boolean;
}

async function errorFrom(response: Response): Promise<ApiError> {
  let message = `${response.status} ${response.statusText}`.trim();
  try {
    const body: unknown = await response.json();
    if (
      typeof body === "object" &&
      body !== null &&
      typeof (body as { detail?: unknown }).detail === "string"
    ) {
      message = (body as { detail: string }).detail;
    }
  } catch {
    // non-JSON error body, keep the status line
  }
  return new ApiError(response.status, message);
}

function queryString(params: Record<string, string | number | undefined>): string {
  const search = new URLSearchParams();
  for (const [name, value] of Object.entries(params)) {
    if (value !== undefined) search.set(name, String(value));
  }
  const text = search.toString();
  return text === "" ? "" : `?${text}`;
}

export function createClient(options: ClientOptions = {}) {
  const base = options.baseUrl ?? "";
  const fetchImpl = options.fetchImpl ?? fetch.bind(globalThis);

  async function request(path: string, init: RequestInit = {}): Promise<unknown> {
    const response = await fetchImpl(base + path, {
      credentials: "same-origin",
      ...init,
    });
    if (!response.ok) throw await errorFrom(response);
    return response.json();
  }

  function jsonInit(method: string, body: unknown): RequestInit {
    return {
      method,
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    };
  }

  return {
    async login(userId: string, password: string): Promise<LoginResult> {
      return decodeLogin(
        await request("/api/auth/login", jsonInit("POST", { user_id: userId, password })),
      );
    },

    async dashboard(periodQuery?: Period): Promise<DashboardSummary> {
      const suffix = periodQuery
        ? queryString({ from: periodQuery.from, to: periodQuery.to })
        : "";
      return decodeDashboard(await request(`/api/dashboard${suffix}`));
    },

    async rankings(query: RankingsQuery = {}): Promise<RankingsPage> {
      return decodeRankings(await request(`/api/rankings${queryString({ ...query })}`));
    },

    async timeseries(kind: EntityKind, id: string, months?: number): Promise<EntityTimeseries> {
      const suffix = queryString({ months });
      return decodeTimeseries(
        await request(`/api/entities/${kind}/${encodeURIComponent(id)}${suffix}`),
      );
    },

    async labelingNext(): Promise<LabelingNext> {
      return decodeLabelingNext(await request("/api/labeling/next"));
    },

    async labelingSubmit(submission: LabelSubmission): Promise<LabelSubmitResult> {
      return decodeLabelSubmit(
        await request("/api/labeling/submit", jsonInit("POST", submission)),
      );
    },

    async labelingProgress(): Promise<Progress> {
      return decodeProgress(await request("/api/labeling/progress"));
    },

    async mineRun(): Promise<void> {
      await request("/api/admin/mine/run", { method: "POST" });
    },

    async mineInterval(seconds: number): Promise<MineInterval> {
      return decodeMineInterval(
        await request("/api/admin/mine/interval", jsonInit("PUT", { interval_seconds: seconds })),
      );
    },
  };
}

export type ApiClient = ReturnType<typeof createClient>;
