// Mining console, deliberately minimal: run a cycle now, change the
// polling interval.

import { ApiClient } from "../client.js";
import { messageOf } from "../render.js";

export function mountAdmin(container: HTMLElement, client: ApiClient): void {
  container.innerHTML = `
    <div class="card narrow">
      <h2>Mining</h2>
      <button id="mine-now">Mine now</button>
      <form id="interval-form">
        <label>Interval (seconds) <input name="seconds" type="number" min="60" value="900"></label>
        <button type="submit">Save</button>
      </form>
      <p id="admin-message"></p>
    </div>`;
  const message = container.querySelector<HTMLElement>("#admin-message")!;

  container.querySelector<HTMLButtonElement>("#mine-now")!.addEventListener("click", () => {
    void client
      .mineRun()
      .then(() => (message.textContent = "Mining started."))
      .catch((error) => (message.textContent = messageOf(error)));
  });

  container.querySelector<HTMLFormElement>("#interval-form")!.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = container.querySelector<HTMLInputElement>("input[name=seconds]")!;
    void client
      .mineInterval(Number(input.value))
      .then((saved) => (message.textContent = `Interval set to ${saved.interval_seconds}s.`))
      .catch((error) => (message.textContent = messageOf(error)));
  });
}
