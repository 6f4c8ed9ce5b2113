// Rankings page: reviewer/project toggle, sort-key select, and a date
// range picker. Any control change re-queries the API; the table shows
// rows exactly in response order. At most one request is live at a
// time; responses for superseded requests are dropped.

import { ApiClient, RankingsQuery } from "../client.js";
import { errorBanner, metricsTable } from "../render.js";
import { EntityKind, RANK_KEYS, RankKey, RankingsPage } from "../types.js";

interface Controls {
  entity: EntityKind;
  key: RankKey;
  from: string; // yyyy-mm-dd, empty = server default period
  to: string;
}

function toTimestamp(day: string): string {
  return `${day}T00:00:00Z`;
}

function controlsHtml(c: Controls): string {
  const entityOptions = (["reviewer", "project"] as const)
    .map((e) => `<option value="${e}"${e === c.entity ? " selected" : ""}>${e}s</option>`)
    .join("");
  const keyOptions = RANK_KEYS.map(
    (k) => `<option value="${k}"${k === c.key ? " selected" : ""}>${k}</option>`,
  ).join("");
  return `
    <form id="rankings-controls">
      <select name="entity">${entityOptions}</select>
      <select name="key">${keyOptions}</select>
      <label>from <input type="date" name="from" value="${c.from}"></label>
      <label>to <input type="date" name="to" value="${c.to}"></label>
      <button type="submit">Apply</button>
      <span id="range-message" class="field-error"></span>
    </form>
    <div id="rankings-table"></div>`;
}

export function mountRankings(container: HTMLElement, client: ApiClient): void {
  const controls: Controls = { entity: "reviewer", key: "RI", from: "", to: "" };
  let token = 0;

  container.innerHTML = controlsHtml(controls);
  const form = container.querySelector<HTMLFormElement>("#rankings-controls")!;
  const table = container.querySelector<HTMLElement>("#rankings-table")!;
  const message = container.querySelector<HTMLElement>("#range-message")!;

  function readControls(): void {
    const data = new FormData(form);
    controls.entity = data.get("entity") as EntityKind;
    controls.key = data.get("key") as RankKey;
    controls.from = (data.get("from") as string) ?? "";
    controls.to = (data.get("to") as string) ?? "";
  }

  function rangeProblem(): string | null {
    const { from, to } = controls;
    if (from === "" && to === "") return null;
    if (from === "" || to === "") return "Pick both dates or neither.";
    if (from >= to) return "Start date must be before end date.";
    return null;
  }

  async function load(): Promise<void> {
    const problem = rangeProblem();
    message.textContent = problem ?? "";
    if (problem !== null) return; // blocked client-side, no request

    const query: RankingsQuery = { entity: controls.entity, key: controls.key };
    if (controls.from !== "") {
      query.from = toTimestamp(controls.from);
      query.to = toTimestamp(controls.to);
    }
    const current = ++token;
    try {
      const page = await client.rankings(query);
      if (current !== token) return; // stale response, a newer query won
      renderPage(page);
    } catch (error) {
      if (current !== token) return;
      table.innerHTML = errorBanner(error);
    }
  }

  function renderPage(page: RankingsPage): void {
    const caption = `<p class="period-line">${page.total} ${page.entity}s, ` +
      `${page.period.from} to ${page.period.to}, by ${page.key}</p>`;
    table.innerHTML = caption + metricsTable(page.rows, page.entity);
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    readControls();
    void load();
  });
  form.querySelectorAll("select").forEach((select) =>
    select.addEventListener("change", () => {
      readControls();
      void load();
    }),
  );

  void load();
}
