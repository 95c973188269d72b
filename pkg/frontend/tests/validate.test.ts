import { describe, expect, it } from "vitest";

import { MAX_BOOKING_SECONDS, validateWindow } from "../src/validate.js";

const NOW = 1_750_000_000;

describe("booking window validation", () => {
  it("accepts a window up to exactly 24 hours", () => {
    expect(validateWindow(NOW + 60, NOW + 60 + MAX_BOOKING_SECONDS, NOW)).toBeNull();
    expect(validateWindow(NOW, NOW + 3600, NOW)).toBeNull();
  });

  it("rejects 24h plus one second with the API's code", () => {
    expect(validateWindow(NOW, NOW + MAX_BOOKING_SECONDS + 1, NOW)).toBe(
      "booking_too_long",
    );
  });

  it("rejects empty and inverted windows", () => {
    expect(validateWindow(NOW, NOW, NOW)).toBe("empty_window");
    expect(validateWindow(NOW + 10, NOW, NOW)).toBe("empty_window");
  });

  it("rejects windows starting in the past", () => {
    expect(validateWindow(NOW - 1, NOW + 3600, NOW)).toBe("booking_in_past");
  });
});
