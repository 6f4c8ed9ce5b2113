import { describe, expect, it } from "vitest";

import { createClient } from "../src/client.js";
import { mountLabeling } from "../src/views/labeling.js";
import {
  container,
  doneLabeling,
  fetchQueue,
  flush,
  jsonResponse,
  pendingLabeling,
} from "./helpers.js";

function pickUseful(root: HTMLElement, value: "yes" | "no"): void {
  const radio = root.querySelector<HTMLInputElement>(`input[name=useful][value=${value}]`)!;
  radio.checked = true;
  radio.dispatchEvent(new Event("change", { bubbles: true }));
}

function pickCategory(root: HTMLElement, name: string): void {
  const select = root.querySelector<HTMLSelectElement>("#category-select")!;
  select.value = name;
  select.dispatchEvent(new Event("change", { bubbles: true }));
}

function submit(root: HTMLElement): void {
  const form = root.querySelector<HTMLFormElement>("#label-form")!;
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

describe("labeling view", () => {
  it("renders the pending comment with link, categories and progress", async () => {
    const root = container();
    mountLabeling(root, createClient({ fetchImpl: fetchQueue(jsonResponse(pendingLabeling("m3", 3, 10))) }));
    await flush();

    expect(root.querySelector("blockquote")?.textContent).toContain("m3");
    expect(root.querySelector("#comment-link")?.getAttribute("href")).toBe(
      "https://gerrit.example/#/c/m3",
    );
    // 18 real categories plus the placeholder option
    expect(root.querySelectorAll("#category-select option")).toHaveLength(19);
    expect(root.querySelector("#labeling-progress")?.textContent).toBe("3 of 10 labeled");
  });

  it("keeps submit locked until both controls are set", async () => {
    const root = container();
    mountLabeling(root, createClient({ fetchImpl: fetchQueue(jsonResponse(pendingLabeling("m3", 3, 10))) }));
    await flush();

    const button = () => root.querySelector<HTMLButtonElement>("#submit-label")!;
    expect(button().disabled).toBe(true);
    pickUseful(root, "yes");
    expect(button().disabled).toBe(true);
    pickCategory(root, "Logical");
    expect(button().disabled).toBe(false);
  });

  it("submits, advances to the next comment, then reaches the done screen", async () => {
    const fetchImpl = fetchQueue(
      jsonResponse(pendingLabeling("m3", 3, 5)),                     // initial next
      jsonResponse({ ok: true, progress: { labeled: 4, total: 5 } }), // submit m3
      jsonResponse(pendingLabeling("m9", 4, 5)),                     // advance
      jsonResponse({ ok: true, progress: { labeled: 5, total: 5 } }), // submit m9
      jsonResponse(doneLabeling(5, 5)),                               // exhausted
    );
    const root = container();
    mountLabeling(root, createClient({ fetchImpl }));
    await flush();

    pickUseful(root, "yes");
    pickCategory(root, "Logical");
    submit(root);
    await flush();

    // the submitted body carried the first comment's id and both choices
    const submitInit = fetchImpl.mock.calls[1]?.[1] as RequestInit;
    expect(JSON.parse(submitInit.body as string)).toEqual({
      comment_id: "m3",
      is_useful: true,
      category: "Logical",
    });

    // advanced: new comment on screen, progress moved forward
    expect(root.querySelector(".comment-card")?.getAttribute("data-comment-id")).toBe("m9");
    expect(root.querySelector("#labeling-progress")?.textContent).toBe("4 of 5 labeled");

    pickUseful(root, "no");
    pickCategory(root, "Praise");
    submit(root);
    await flush();

    expect(root.querySelector("#labeling-done")).not.toBeNull();
    expect(root.querySelector("#labeling-progress")?.textContent).toBe("5 of 5 labeled");
    const secondBody = JSON.parse((fetchImpl.mock.calls[3]?.[1] as RequestInit).body as string);
    expect(secondBody).toEqual({ comment_id: "m9", is_useful: false, category: "Praise" });
  });

  it("explains a 403 instead of advancing", async () => {
    const fetchImpl = fetchQueue(
      jsonResponse(pendingLabeling("m3", 0, 2)),
      jsonResponse({ detail: "not the change author" }, 403),
    );
    const root = container();
    mountLabeling(root, createClient({ fetchImpl }));
    await flush();

    pickUseful(root, "yes");
    pickCategory(root, "Logical");
    submit(root);
    await flush();

    expect(root.querySelector("#label-message")?.textContent).toContain("not yours to label");
    expect(root.querySelector(".comment-card")?.getAttribute("data-comment-id")).toBe("m3");
  });

  it("shows the completion screen straight away for an empty queue", async () => {
    const root = container();
    mountLabeling(root, createClient({ fetchImpl: fetchQueue(jsonResponse(doneLabeling(0, 0))) }));
    await flush();
    expect(root.querySelector("#labeling-done")?.textContent).toContain("All done");
  });
});
