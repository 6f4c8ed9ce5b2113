// Labeling page for change authors: one comment at a time, a
// useful/not-useful choice plus a category, and a progress counter.
// Submitting stores the verdict and advances to the next comment.

import { ApiClient, ApiError, LabelSubmission } from "../client.js";
import { errorBanner, escapeHtml } from "../render.js";
import { LabelingNext, Progress } from "../types.js";

function progressLine(p: Progress): string {
  return `<p id="labeling-progress" class="progress">${p.labeled} of ${p.total} labeled</p>`;
}

function formHtml(next: Extract<LabelingNext, { done: false }>): string {
  const c = next.comment;
  const link = c.link
    ? `<a href="${escapeHtml(c.link)}" target="_blank" rel="noopener" id="comment-link">Open in review tool</a>`
    : "";
  const categories = next.categories
    .map((name) => `<option value="${escapeHtml(name)}">${escapeHtml(name)}</option>`)
    .join("");
  return `
    <article class="comment-card" data-comment-id="${escapeHtml(c.comment_id)}">
      <header>${escapeHtml(c.author_id)} wrote on ${escapeHtml(c.written_at)}</header>
      <blockquote>${escapeHtml(c.text)}</blockquote>
      ${link}
    </article>
    <form id="label-form">
      <fieldset id="useful-choice">
        <label><input type="radio" name="useful" value="yes"> Useful</label>
        <label><input type="radio" name="useful" value="no"> Not useful</label>
      </fieldset>
      <select name="category" id="category-select">
        <option value="">Pick a category</option>
        ${categories}
      </select>
      <button type="submit" id="submit-label" disabled>Submit</button>
      <span id="label-message" class="field-error"></span>
    </form>
    ${progressLine(next.progress)}`;
}

export function mountLabeling(container: HTMLElement, client: ApiClient): void {
  async function load(): Promise<void> {
    try {
      render(await client.labelingNext());
    } catch (error) {
      container.innerHTML = errorBanner(error);
    }
  }

  function render(next: LabelingNext): void {
    if (next.done) {
      container.innerHTML = `
        <div id="labeling-done" class="card">
          <h2>All done</h2>
          <p>No comments are waiting for your verdict.</p>
          ${progressLine(next.progress)}
        </div>`;
      return;
    }
    container.innerHTML = formHtml(next);
    wireForm(next.comment.comment_id);
  }

  function wireForm(commentId: string): void {
    const form = container.querySelector<HTMLFormElement>("#label-form")!;
    const submit = container.querySelector<HTMLButtonElement>("#submit-label")!;
    const message = container.querySelector<HTMLElement>("#label-message")!;

    function currentChoice(): { useful: string | null; category: string } {
      const data = new FormData(form);
      return {
        useful: data.get("useful") as string | null,
        category: (data.get("category") as string) ?? "",
      };
    }

    // Both controls are required before submit unlocks.
    function refresh(): void {
      const { useful, category } = currentChoice();
      submit.disabled = useful === null || category === "";
    }
    form.addEventListener("change", refresh);
    refresh();

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const { useful, category } = currentChoice();
      if (useful === null || category === "") return;
      const submission: LabelSubmission = {
        comment_id: commentId,
        is_useful: useful === "yes",
        category,
      };
      void send(submission, message);
    });
  }

  async function send(submission: LabelSubmission, message: HTMLElement): Promise<void> {
    try {
      await client.labelingSubmit(submission);
      await load(); // advance to the next comment
    } catch (error) {
      if (error instanceof ApiError && error.status === 403) {
        message.textContent = "That comment is not on your change, so it is not yours to label.";
        return;
      }
      if (error instanceof ApiError && error.status === 409) {
        message.innerHTML = `Already labeled. <button type="button" id="overwrite-label">Replace the label</button>`;
        message.querySelector("#overwrite-label")!.addEventListener("click", () => {
          void send({ ...submission, overwrite: true }, message);
        });
        return;
      }
      message.textContent = `Submit failed: ${error instanceof Error ? error.message : String(error)}`;
    }
  }

  void load();
}
