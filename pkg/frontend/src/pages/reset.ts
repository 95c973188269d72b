import { ApiClient, ApiError } from "../api.js";
import { clearFieldErrors, el, field, setFieldError } from "../dom.js";
import type { Page } from "../router.js";
import { describeError } from "../validate.js";

export class ResetPage implements Page {
  constructor(private api: ApiClient) {}

  render(root: HTMLElement): void {
    const email = el("input", { name: "email", type: "email", required: true });
    const requestForm = el(
      "form",
      { id: "reset-request-form" },
      el("h2", {}, "Reset password"),
      field("Email", email, "err-email"),
      el("button", { type: "submit" }, "Send reset code"),
      el("p", { class: "form-note", id: "note-sent" }),
    );

    const code = el("input", { name: "code", type: "text", required: true });
    const newPassword = el("input", { name: "new_password", type: "password", required: true });
    const redeemForm = el(
      "form",
      { id: "reset-redeem-form" },
      field("Reset code", code, "err-code"),
      field("New password", newPassword, "err-new-password"),
      el("button", { type: "submit" }, "Set new password"),
      el("p", { class: "form-error", id: "err-form" }),
      el("p", {}, el("a", { href: "#/login" }, "Back to sign in")),
    );

    requestForm.addEventListener("submit", async (event) => {
      event.preventDefault();
      await this.api.requestPasswordReset(email.value);
      // Same confirmation whether or not the email exists.
      setFieldError(requestForm, "note-sent", "If the account exists, a code was sent by SMS.");
    });

    redeemForm.addEventListener("submit", async (event) => {
      event.preventDefault();
      clearFieldErrors(redeemForm);
      try {
        await this.api.redeemPasswordReset(code.value, newPassword.value);
        window.location.hash = "#/login";
      } catch (err) {
        if (err instanceof ApiError) {
          const target = err.code === "weak_password" ? "err-new-password" : "err-form";
          setFieldError(redeemForm, target, describeError(err.code, err.message));
        } else {
          throw err;
        }
      }
    });

    root.append(requestForm, redeemForm);
  }
}
