import { ApiClient, ApiError } from "../api.js";
import { clearFieldErrors, el, field, setFieldError } from "../dom.js";
import type { Page } from "../router.js";
import { describeError } from "../validate.js";

// API error codes anchored to the field that caused them.
const FIELD_FOR_CODE: Record<string, string> = {
  duplicate_email: "err-email",
  invalid_email: "err-email",
  weak_password: "err-password",
};

export class RegisterPage implements Page {
  constructor(private api: ApiClient) {}

  render(root: HTMLElement): void {
    const name = el("input", { name: "name", type: "text", required: true });
    const email = el("input", { name: "email", type: "email", required: true });
    const phone = el("input", { name: "phone", type: "tel" });
    const password = el("input", { name: "password", type: "password", required: true });
    const form = el(
      "form",
      { id: "register-form" },
      el("h2", {}, "Create account"),
      field("Name", name, "err-name"),
      field("Email", email, "err-email"),
      field("Phone", phone, "err-phone"),
      field("Password", password, "err-password"),
      el("button", { type: "submit" }, "Register"),
      el("p", { class: "form-error", id: "err-form" }),
      el("p", {}, el("a", { href: "#/login" }, "Sign in instead")),
    );
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      clearFieldErrors(form);
      try {
        await this.api.register(name.value, email.value, phone.value, password.value);
        window.location.hash = "#/login";
      } catch (err) {
        if (err instanceof ApiError) {
          const target = FIELD_FOR_CODE[err.code] ?? "err-form";
          setFieldError(form, target, describeError(err.code, err.message));
        } else {
          throw err;
        }
      }
    });
    root.append(form);
  }
}
