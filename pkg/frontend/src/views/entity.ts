// Detail page for one reviewer or project: a monthly table with a bar
// per month sized by RI. Bar widths are layout only; the printed
// numbers come straight from the API.

import { ApiClient } from "../client.js";
import { errorBanner, escapeHtml, verbatim } from "../render.js";
import { EntityKind, EntityTimeseries } from "../types.js";

const MONTH_CHOICES = [3, 6, 12, 24];

function bucketsHtml(series: EntityTimeseries): string {
  if (series.buckets.length === 0) {
    return `<p class="placeholder">No months to show.</p>`;
  }
  const peak = Math.max(1, ...series.buckets.map((b) => Math.abs(b.RI)));
  const rows = series.buckets
    .map((b) => {
      const width = Math.round((Math.abs(b.RI) / peak) * 100);
      return `<tr>
        <td>${escapeHtml(b.month)}</td>
        <td>${verbatim(b.NR)}</td>
        <td>${verbatim(b.NC)}</td>
        <td>${verbatim(b.UC)}</td>
        <td>${verbatim(b.RE)}</td>
        <td>${verbatim(b.RI)}</td>
        <td class="bar-cell"><span class="bar" style="width:${width}%"></span></td>
      </tr>`;
    })
    .join("");
  return `<table class="metrics timeseries">
    <thead><tr><th>month</th><th>NR</th><th>NC</th><th>UC</th><th>RE</th><th>RI</th><th></th></tr></thead>
    <tbody>${rows}</tbody></table>`;
}

export function mountEntity(
  container: HTMLElement,
  client: ApiClient,
  kind: EntityKind,
  id: string,
): void {
  let months = 6;
  let token = 0;

  async function load(): Promise<void> {
    const current = ++token;
    try {
      const series = await client.timeseries(kind, id, months);
      if (current !== token) return;
      render(series);
    } catch (error) {
      if (current !== token) return;
      container.innerHTML = errorBanner(error);
    }
  }

  function render(series: EntityTimeseries): void {
    const options = MONTH_CHOICES.map(
      (m) => `<option value="${m}"${m === months ? " selected" : ""}>${m} months</option>`,
    ).join("");
    container.innerHTML = `
      <header class="entity-head">
        <h2>${escapeHtml(series.kind)} ${escapeHtml(series.id)}</h2>
        <select id="months-select">${options}</select>
      </header>
      ${bucketsHtml(series)}`;
    container.querySelector<HTMLSelectElement>("#months-select")!.addEventListener("change", (e) => {
      months = Number((e.target as HTMLSelectElement).value);
      void load();
    });
  }

  void load();
}
