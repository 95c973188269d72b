// @vitest-environment jsdom
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { MePage } from "../src/pages/me.js";
import { errorResponse, flushMicrotasks, installFakeFetch, jsonResponse } from "./helpers.js";

function reservation(overrides: Record<string, unknown>) {
  return {
    reservation_id: "r000001",
    user_id: "u000001",
    lot_id: "L1",
    slot_id: "S1",
    window_start: 1_750_000_000,
    window_end: 1_750_007_200,
    state: "ACTIVE",
    created_at: 0,
    hold_deadline: 1_750_001_800,
    eta: null,
    extra_codes: [],
    session_id: null,
    bill_id: null,
    ...overrides,
  };
}

const BILL = {
  bill_id: "b000001",
  session_id: "p000001",
  duration_minutes: 61,
  base_fee: { amount_minor: 1250, currency: "USD" },
  extras_fee: { amount_minor: 500, currency: "USD" },
  total: { amount_minor: 1750, currency: "USD" },
  issued_at: 1_750_003_660,
};

beforeEach(() => {
  document.body.innerHTML = "<div id='root'></div>";
});

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("my reservations page", () => {
  it("shows state chips and cancel only for ACTIVE", async () => {
    installFakeFetch((_method, path) => {
      if (path === "/api/v1/me/reservations") {
        return jsonResponse([
          reservation({ reservation_id: "r000001", state: "ACTIVE" }),
          reservation({ reservation_id: "r000002", state: "EXPIRED" }),
        ]);
      }
      return errorResponse(404, "unknown_route");
    });
    const root = document.getElementById("root")!;
    new MePage(new ApiClient("", () => "tok")).render(root);
    await flushMicrotasks();
    const cards = root.querySelectorAll(".reservation-card");
    expect(cards.length).toBe(2);
    expect(cards[0]!.querySelector(".chip")!.textContent).toBe("ACTIVE");
    expect(cards[0]!.querySelector(".cancel-button")).not.toBeNull();
    expect(cards[1]!.querySelector(".chip")!.textContent).toBe("EXPIRED");
    expect(cards[1]!.querySelector(".cancel-button")).toBeNull();
    expect(cards[1]!.querySelector(".bill")).toBeNull(); // no bill for no-shows
  });

  it("cancelling an ACTIVE reservation flips its chip", async () => {
    let cancelled = false;
    installFakeFetch((method, path) => {
      if (method === "DELETE" && path === "/api/v1/reservations/r000001") {
        cancelled = true;
        return jsonResponse(reservation({ state: "CANCELLED" }));
      }
      if (path === "/api/v1/me/reservations") {
        return jsonResponse([
          reservation({ state: cancelled ? "CANCELLED" : "ACTIVE" }),
        ]);
      }
      return errorResponse(404, "unknown_route");
    });
    const root = document.getElementById("root")!;
    new MePage(new ApiClient("", () => "tok")).render(root);
    await flushMicrotasks();
    root.querySelector<HTMLButtonElement>(".cancel-button")!.click();
    await flushMicrotasks();
    await flushMicrotasks();
    expect(root.querySelector(".chip")!.textContent).toBe("CANCELLED");
    expect(root.querySelector(".cancel-button")).toBeNull();
  });

  it("shows bill line items for COMPLETED reservations, money from minor units", async () => {
    installFakeFetch((_method, path) => {
      if (path === "/api/v1/me/reservations") {
        return jsonResponse([
          reservation({ state: "COMPLETED", session_id: "p000001", bill_id: "b000001" }),
        ]);
      }
      if (path === "/api/v1/bills/b000001") return jsonResponse(BILL);
      return errorResponse(404, "unknown_route");
    });
    const root = document.getElementById("root")!;
    new MePage(new ApiClient("", () => "tok")).render(root);
    await flushMicrotasks();
    await flushMicrotasks();
    const bill = root.querySelector(".bill")!;
    expect(bill.textContent).toContain("61 min");
    expect(bill.textContent).toContain("12.50 USD");
    expect(bill.textContent).toContain("5.00 USD");
    expect(bill.textContent).toContain("17.50 USD");
  });
});
