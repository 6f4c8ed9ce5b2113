// Landing page: best reviewer and best project of the period, the
// overall usefulness percentage, and the two top-5 tables.

import { ApiClient } from "../client.js";
import { entityHref, errorBanner, escapeHtml, metricsTable, verbatim } from "../render.js";
import { DashboardSummary } from "../types.js";

function isEmpty(summary: DashboardSummary): boolean {
  return (
    summary.best_reviewer === null &&
    summary.best_project === null &&
    summary.top5_reviewers.length === 0 &&
    summary.top5_projects.length === 0
  );
}

function summaryHtml(summary: DashboardSummary): string {
  if (isEmpty(summary)) {
    return `<p class="placeholder">No activity between ${escapeHtml(summary.period.from)} and ${escapeHtml(summary.period.to)}.</p>`;
  }
  const reviewer = summary.best_reviewer
    ? `<a href="${entityHref("reviewer", summary.best_reviewer.id)}" class="entity-link">${escapeHtml(summary.best_reviewer.id)}</a>
       <span class="detail">RI ${verbatim(summary.best_reviewer.RI)}</span>`
    : `<span class="placeholder">none</span>`;
  const project = summary.best_project
    ? `<a href="${entityHref("project", summary.best_project.id)}" class="entity-link">${escapeHtml(summary.best_project.id)}</a>
       <span class="detail">${verbatim(summary.best_project.useful_pct)}% useful</span>`
    : `<span class="placeholder">none</span>`;
  return `
    <section class="headline">
      <div class="card" id="best-reviewer"><h2>Best reviewer</h2>${reviewer}</div>
      <div class="card" id="best-project"><h2>Best project</h2>${project}</div>
      <div class="card" id="useful-pct"><h2>Useful comments</h2>
        <span class="big">${verbatim(summary.useful_pct)}%</span></div>
    </section>
    <section class="tables">
      <div id="top-reviewers"><h3>Top reviewers</h3>${metricsTable(summary.top5_reviewers, "reviewer")}</div>
      <div id="top-projects"><h3>Top projects</h3>${metricsTable(summary.top5_projects, "project")}</div>
    </section>`;
}

export function mountDashboard(container: HTMLElement, client: ApiClient): void {
  let token = 0;

  async function load(): Promise<void> {
    const current = ++token;
    container.innerHTML = `<p class="loading">Loading...</p>`;
    try {
      const summary = await client.dashboard();
      if (current !== token) return; // superseded by a newer load
      container.innerHTML = `
        <header class="period-line">Period ${escapeHtml(summary.period.from)} to ${escapeHtml(summary.period.to)}</header>
        ${summaryHtml(summary)}`;
    } catch (error) {
      if (current !== token) return;
      container.innerHTML = errorBanner(error);
    }
  }

  void load();
}
