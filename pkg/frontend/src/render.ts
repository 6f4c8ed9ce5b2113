// Shared rendering helpers. One rule matters here: metric values are
// printed exactly as the API sent them. The client never rounds, sums,
// or re-derives a number; String(value) is the whole formatting story.

import { ApiError } from "./client.js";
import { EntityKind, RankedRow } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function verbatim(value: number): string {
  return String(value);
}

export function messageOf(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  if (error instanceof Error) return error.message;
  return String(error);
}

export function errorBanner(error: unknown): string {
  return `<div class="banner error" role="alert">${escapeHtml(messageOf(error))}</div>`;
}

const METRIC_COLUMNS = ["NR", "NC", "UC", "CUD", "ID", "RE", "RI", "review_score"] as const;

export function entityHref(kind: EntityKind, id: string): string {
  return `#/entity/${kind}/${encodeURIComponent(id)}`;
}

/** Ranking table. Rows render in API order; sorting happens server-side. */
export function metricsTable(rows: RankedRow[], kind: EntityKind): string {
  const header = METRIC_COLUMNS.map((c) => `<th>${c}</th>`).join("");
  const body = rows
    .map((row) => {
      const cells = METRIC_COLUMNS.map((c) => `<td>${verbatim(row[c])}</td>`).join("");
      return (
        `<tr><td>${verbatim(row.rank)}</td>` +
        `<td><a href="${entityHref(kind, row.id)}" class="entity-link">${escapeHtml(row.id)}</a></td>` +
        cells +
        `</tr>`
      );
    })
    .join("");
  return (
    `<table class="metrics">` +
    `<thead><tr><th>#</th><th>${kind}</th>${header}</tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}
