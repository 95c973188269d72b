import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { errorResponse, installFakeFetch, jsonResponse } from "./helpers.js";

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("api client", () => {
  it("sends the bearer token on authenticated calls", async () => {
    const log = installFakeFetch(() => jsonResponse([]));
    const api = new ApiClient("", () => "tok-123");
    await api.myReservations();
    expect(log[0]?.headers["Authorization"]).toBe("Bearer tok-123");
  });

  it("omits the header without a token", async () => {
    const log = installFakeFetch(() => jsonResponse([]));
    const api = new ApiClient("", () => null);
    await api.searchLots(0, 0, 100);
    expect(log[0]?.headers["Authorization"]).toBeUndefined();
    expect(log[0]?.path).toBe("/api/v1/lots?lat=0&lon=0&radius_m=100");
  });

  it("sets the Idempotency-Key header on bookings", async () => {
    const log = installFakeFetch(() => jsonResponse({ reservation_id: "r000001" }, 201));
    const api = new ApiClient("", () => "tok");
    await api.createReservation(
      { lot_id: "L1", window_start: 1, window_end: 2 },
      "retry-key-1",
    );
    expect(log[0]?.headers["Idempotency-Key"]).toBe("retry-key-1");
    expect(log[0]?.method).toBe("POST");
  });

  it("surfaces stable error codes from the error envelope", async () => {
    installFakeFetch(() => errorResponse(422, "booking_too_long", "over the cap"));
    const api = new ApiClient("", () => "tok");
    const failure = await api
      .createReservation({ lot_id: "L1", window_start: 1, window_end: 2 })
      .catch((err) => err);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(422);
    expect(failure.code).toBe("booking_too_long");
  });

  it("maps network failures to a code", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => {
      throw new TypeError("fetch failed");
    }));
    const api = new ApiClient("", () => null);
    const failure = await api.searchLots(0, 0, 1).catch((err) => err);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.code).toBe("network_error");
  });
});
