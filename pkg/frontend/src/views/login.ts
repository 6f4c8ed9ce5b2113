// Session login. The API sets a signed cookie; the page just posts the
// form and bounces back to the dashboard.

import { ApiClient } from "../client.js";
import { escapeHtml, messageOf } from "../render.js";

export function mountLogin(container: HTMLElement, client: ApiClient, onDone: () => void): void {
  container.innerHTML = `
    <form id="login-form" class="card narrow">
      <h2>Sign in</h2>
      <label>User <input name="user_id" autocomplete="username"></label>
      <label>Password <input name="password" type="password" autocomplete="current-password"></label>
      <button type="submit">Sign in</button>
      <span id="login-message" class="field-error"></span>
    </form>`;
  const form = container.querySelector<HTMLFormElement>("#login-form")!;
  const message = container.querySelector<HTMLElement>("#login-message")!;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    void client
      .login((data.get("user_id") as string) ?? "", (data.get("password") as string) ?? "")
      .then((result) => {
        message.textContent = `Signed in as ${escapeHtml(result.user_id)}`;
        onDone();
      })
      .catch((error) => {
        message.textContent = messageOf(error);
      });
  });
}
