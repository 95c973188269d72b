import { ApiClient, ApiError } from "../api.js";
import { clearFieldErrors, el, field, setFieldError } from "../dom.js";
import type { Page } from "../router.js";
import { setToken } from "../state.js";
import { describeError } from "../validate.js";

export class LoginPage implements Page {
  constructor(private api: ApiClient) {}

  render(root: HTMLElement): void {
    const email = el("input", { name: "email", type: "email", required: true });
    const password = el("input", { name: "password", type: "password", required: true });
    const form = el(
      "form",
      { id: "login-form" },
      el("h2", {}, "Sign in"),
      field("Email", email, "err-email"),
      field("Password", password, "err-password"),
      el("button", { type: "submit" }, "Sign in"),
      el("p", { class: "form-error", id: "err-form" }),
      el(
        "p",
        {},
        el("a", { href: "#/register" }, "Create account"),
        " · ",
        el("a", { href: "#/reset" }, "Forgot password"),
      ),
    );
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      clearFieldErrors(form);
      try {
        const session = await this.api.login(email.value, password.value);
        setToken(session.token);
        window.location.hash = "#/search";
      } catch (err) {
        if (err instanceof ApiError) {
          setFieldError(form, "err-form", describeError(err.code, err.message));
        } else {
          throw err;
        }
      }
    });
    root.append(form);
  }
}
