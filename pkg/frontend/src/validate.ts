// Client-side booking checks. Advisory only: the API enforces every rule
// again and answers with the same stable codes.

export const MAX_BOOKING_SECONDS = 24 * 3600;

export type WindowError = "empty_window" | "booking_in_past" | "booking_too_long";

export function validateWindow(
  startSec: number,
  endSec: number,
  nowSec: number,
): WindowError | null {
  if (startSec >= endSec) return "empty_window";
  if (startSec < nowSec) return "booking_in_past";
  if (endSec - startSec > MAX_BOOKING_SECONDS) return "booking_too_long";
  return null;
}

export const ERROR_TEXT: Record<string, string> = {
  empty_window: "The booking window is empty.",
  booking_in_past: "The booking starts in the past.",
  booking_too_long: "Bookings are capped at 24 hours.",
  invalid_credentials: "Email or password is incorrect.",
  duplicate_email: "This email is already registered.",
  weak_password: "Password must be at least 8 characters.",
  invalid_email: "This is not a valid email address.",
  slot_unavailable: "That slot cannot host this window.",
  no_slot_free: "No slot is free for this window.",
  not_owner: "This booking belongs to another account.",
  code_invalid: "Unknown reset code.",
  code_expired: "This reset code has expired.",
  code_already_used: "This reset code was already used.",
  network_error: "Cannot reach the parking service.",
};

export function describeError(code: string, fallback: string): string {
  return ERROR_TEXT[code] ?? fallback;
}
