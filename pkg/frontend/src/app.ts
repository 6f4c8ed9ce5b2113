// Hash router and page shell. The visible view is a pure function of
// the hash route plus whatever the mounted page last fetched, so a
// reload lands on the same screen.

import { ApiClient } from "./client.js";
import { EntityKind } from "./types.js";
import { mountAdmin } from "./views/admin.js";
import { mountDashboard } from "./views/dashboard.js";
import { mountEntity } from "./views/entity.js";
import { mountLabeling } from "./views/labeling.js";
import { mountLogin } from "./views/login.js";
import { mountRankings } from "./views/rankings.js";

export type Route =
  | { view: "dashboard" }
  | { view: "rankings" }
  | { view: "entity"; kind: EntityKind; id: string }
  | { view: "labeling" }
  | { view: "login" }
  | { view: "admin" };

export function parseRoute(hash: string): Route {
  const parts = hash.replace(/^#\/?/, "").split("/").filter((p) => p !== "");
  switch (parts[0]) {
    case undefined:
    case "dashboard":
      return { view: "dashboard" };
    case "rankings":
      return { view: "rankings" };
    case "entity": {
      const kind = parts[1];
      const id = parts[2];
      if ((kind === "reviewer" || kind === "project") && id !== undefined) {
        return { view: "entity", kind, id: decodeURIComponent(id) };
      }
      return { view: "dashboard" };
    }
    case "labeling":
      return { view: "labeling" };
    case "login":
      return { view: "login" };
    case "admin":
      return { view: "admin" };
    default:
      return { view: "dashboard" };
  }
}

const NAV = `
  <nav id="topnav">
    <span class="brand">reviewlens</span>
    <a href="#/dashboard">Dashboard</a>
    <a href="#/rankings">Rankings</a>
    <a href="#/labeling">Labeling</a>
    <a href="#/admin">Admin</a>
    <a href="#/login" class="right">Sign in</a>
  </nav>
  <main id="view"></main>`;

export function createApp(root: HTMLElement, client: ApiClient) {
  root.innerHTML = NAV;
  const view = root.querySelector<HTMLElement>("#view")!;

  function route(): void {
    const here = parseRoute(window.location.hash);
    switch (here.view) {
      case "dashboard":
        mountDashboard(view, client);
        break;
      case "rankings":
        mountRankings(view, client);
        break;
      case "entity":
        mountEntity(view, client, here.kind, here.id);
        break;
      case "labeling":
        mountLabeling(view, client);
        break;
      case "login":
        mountLogin(view, client, () => {
          window.location.hash = "#/dashboard";
        });
        break;
      case "admin":
        mountAdmin(view, client);
        break;
    }
  }

  window.addEventListener("hashchange", route);
  return { route, view };
}
