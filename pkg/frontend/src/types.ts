// View-model types mirroring the API's JSON bodies, plus strict runtime
// decoders. Every payload crosses one of these decoders before any view
// touches it, so a render function can assume its input is well formed.

export type EntityKind = "reviewer" | "project";
export type RankKey = "RI" | "RE" | "NC" | "CUD" | "review_score";

export const RANK_KEYS: readonly RankKey[] = ["RI", "RE", "NC", "CUD", "review_score"];

export interface Period {
  from: string;
  to: string;
}

export interface MetricRow {
  id: string;
  NR: number;
  NC: number;
  UC: number;
  CUD: number;
  ID: number;
  RE: number;
  RI: number;
  NC_score: number;
  CUD_score: number;
  review_score: number;
}

export interface RankedRow extends MetricRow {
  rank: number;
}

export interface DashboardSummary {
  period: Period;
  best_reviewer: { id: string; RI: number } | null;
  best_project: { id: string; useful_pct: number } | null;
  useful_pct: number;
  top5_reviewers: RankedRow[];
  top5_projects: RankedRow[];
}

export interface RankingsPage {
  period: Period;
  entity: EntityKind;
  key: RankKey;
  total: number;
  offset: number;
  rows: RankedRow[];
}

export interface TimeseriesBucket extends MetricRow {
  month: string;
}

export interface EntityTimeseries {
  id: string;
  kind: EntityKind;
  buckets: TimeseriesBucket[];
}

export interface Progress {
  labeled: number;
  total: number;
}

export interface PendingComment {
  comment_id: string;
  text: string;
  author_id: string;
  written_at: string;
  link: string | null;
}

export type LabelingNext =
  | { done: true; comment: null; progress: Progress }
  | { done: false; comment: PendingComment; categories: string[]; progress: Progress };

export interface LabelSubmitResult {
  ok: true;
  progress: Progress;
}

export interface LoginResult {
  user_id: string;
  role: "user" | "admin";
}

export interface MineInterval {
  endpoint: string;
  interval_seconds: number;
}

export class DecodeError extends Error {
  constructor(path: string, expected: string, got: unknown) {
    super(`${path}: expected ${expected}, got ${JSON.stringify(got)}`);
    this.name = "DecodeError";
  }
}

function obj(value: unknown, path: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new DecodeError(path, "object", value);
  }
  return value as Record<string, unknown>;
}

function str(value: unknown, path: string): string {
  if (typeof value !== "string") throw new DecodeError(path, "string", value);
  return value;
}

function num(value: unknown, path: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new DecodeError(path, "number", value);
  }
  return value;
}

function arr(value: unknown, path: string): unknown[] {
  if (!Array.isArray(value)) throw new DecodeError(path, "array", value);
  return value;
}

function oneOf<T extends string>(value: unknown, choices: readonly T[], path: string): T {
  const text = str(value, path);
  if (!(choices as readonly string[]).includes(text)) {
    throw new DecodeError(path, choices.join("|"), value);
  }
  return text as T;
}

function period(value: unknown, path: string): Period {
  const o = obj(value, path);
  return { from: str(o.from, `${path}.from`), to: str(o.to, `${path}.to`) };
}

function metricRow(value: unknown, path: string): MetricRow {
  const o = obj(value, path);
  return {
    id: str(o.id, `${path}.id`),
    NR: num(o.NR, `${path}.NR`),
    NC: num(o.NC, `${path}.NC`),
    UC: num(o.UC, `${path}.UC`),
    CUD: num(o.CUD, `${path}.CUD`),
    ID: num(o.ID, `${path}.ID`),
    RE: num(o.RE, `${path}.RE`),
    RI: num(o.RI, `${path}.RI`),
    NC_score: num(o.NC_score, `${path}.NC_score`),
    CUD_score: num(o.CUD_score, `${path}.CUD_score`),
    review_score: num(o.review_score, `${path}.review_score`),
  };
}

function rankedRow(value: unknown, path: string): RankedRow {
  const o = obj(value, path);
  return { ...metricRow(value, path), rank: num(o.rank, `${path}.rank`) };
}

function progress(value: unknown, path: string): Progress {
  const o = obj(value, path);
  return {
    labeled: num(o.labeled, `${path}.labeled`),
    total: num(o.total, `${path}.total`),
  };
}

export function decodeDashboard(value: unknown): DashboardSummary {
  const o = obj(value, "dashboard");
  let bestReviewer: DashboardSummary["best_reviewer"] = null;
  if (o.best_reviewer !== null && o.best_reviewer !== undefined) {
    const b = obj(o.best_reviewer, "dashboard.best_reviewer");
    bestReviewer = {
      id: str(b.id, "dashboard.best_reviewer.id"),
      RI: num(b.RI, "dashboard.best_reviewer.RI"),
    };
  }
  let bestProject: DashboardSummary["best_project"] = null;
  if (o.best_project !== null && o.best_project !== undefined) {
    const b = obj(o.best_project, "dashboard.best_project");
    bestProject = {
      id: str(b.id, "dashboard.best_project.id"),
      useful_pct: num(b.useful_pct, "dashboard.best_project.useful_pct"),
    };
  }
  return {
    period: period(o.period, "dashboard.period"),
    best_reviewer: bestReviewer,
    best_project: bestProject,
    useful_pct: num(o.useful_pct, "dashboard.useful_pct"),
    top5_reviewers: arr(o.top5_reviewers, "dashboard.top5_reviewers").map((r, i) =>
      rankedRow(r, `dashboard.top5_reviewers[${i}]`),
    ),
    top5_projects: arr(o.top5_projects, "dashboard.top5_projects").map((r, i) =>
      rankedRow(r, `dashboard.top5_projects[${i}]`),
    ),
  };
}

export function decodeRankings(value: unknown): RankingsPage {
  const o = obj(value, "rankings");
  return {
    period: period(o.period, "rankings.period"),
    entity: oneOf(o.entity, ["reviewer", "project"] as const, "rankings.entity"),
    key: oneOf(o.key, RANK_KEYS, "rankings.key"),
    total: num(o.total, "rankings.total"),
    offset: num(o.offset, "rankings.offset"),
    rows: arr(o.rows, "rankings.rows").map((r, i) => rankedRow(r, `rankings.rows[${i}]`)),
  };
}

export function decodeTimeseries(value: unknown): EntityTimeseries {
  const o = obj(value, "timeseries");
  return {
    id: str(o.id, "timeseries.id"),
    kind: oneOf(o.kind, ["reviewer", "project"] as const, "timeseries.kind"),
    buckets: arr(o.buckets, "timeseries.buckets").map((b, i) => {
      const bo = obj(b, `timeseries.buckets[${i}]`);
      return {
        ...metricRow(b, `timeseries.buckets[${i}]`),
        month: str(bo.month, `timeseries.buckets[${i}].month`),
      };
    }),
  };
}

export function decodeLabelingNext(value: unknown): LabelingNext {
  const o = obj(value, "labeling");
  if (o.done === true) {
    return { done: true, comment: null, progress: progress(o.progress, "labeling.progress") };
  }
  if (o.done !== false) throw new DecodeError("labeling.done", "boolean", o.done);
  const c = obj(o.comment, "labeling.comment");
  const link = c.link === null || c.link === undefined ? null : str(c.link, "labeling.comment.link");
  return {
    done: false,
    comment: {
      comment_id: str(c.comment_id, "labeling.comment.comment_id"),
      text: str(c.text, "labeling.comment.text"),
      author_id: str(c.author_id, "labeling.comment.author_id"),
      written_at: str(c.written_at, "labeling.comment.written_at"),
      link,
    },
    categories: arr(o.categories, "labeling.categories").map((c, i) =>
      str(c, `labeling.categories[${i}]`),
    ),
    progress: progress(o.progress, "labeling.progress"),
  };
}

export function decodeLabelSubmit(value: unknown): LabelSubmitResult {
  const o = obj(value, "submit");
  if (o.ok !== true) throw new DecodeError("submit.ok", "true", o.ok);
  return { ok: true, progress: progress(o.progress, "submit.progress") };
}

export function decodeLogin(value: unknown): LoginResult {
  const o = obj(value, "login");
  return {
    user_id: str(o.user_id, "login.user_id"),
    role: oneOf(o.role, ["user", "admin"] as const, "login.role"),
  };
}

export function decodeProgress(value: unknown): Progress {
  return progress(value, "progress");
}

export function decodeMineInterval(value: unknown): MineInterval {
  const o = obj(value, "interval");
  return {
    endpoint: str(o.endpoint, "interval.endpoint"),
    interval_seconds: num(o.interval_seconds, "interval.interval_seconds"),
  };
}
