// Shared fakes: an in-memory backend behind global fetch.

import { vi } from "vitest";

export function jsonResponse(data: unknown, status = 200): Response {
  return new Response(JSON.stringify(data), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function errorResponse(status: number, code: string, message = code): Response {
  return jsonResponse({ error: { code, message } }, status);
}

export type Handler = (
  method: string,
  path: string,
  body: unknown,
  headers: Record<string, string>,
) => Response | Promise<Response>;

export interface FetchLogEntry {
  method: string;
  path: string;
  body: unknown;
  headers: Record<string, string>;
}

export function installFakeFetch(handler: Handler): FetchLogEntry[] {
  const log: FetchLogEntry[] = [];
  vi.stubGlobal(
    "fetch",
    vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      const path = url.startsWith("http") ? new URL(url).pathname + new URL(url).search : url;
      const method = init?.method ?? "GET";
      const body = init?.body ? JSON.parse(String(init.body)) : undefined;
      const headers = (init?.headers as Record<string, string>) ?? {};
      log.push({ method, path, body, headers });
      return handler(method, path, body, headers);
    }),
  );
  return log;
}

export function flushMicrotasks(): Promise<void> {
  return new Promise((resolve) => {
    setTimeout(resolve, 0);
  });
}

export const SLOTS_FIXTURE = [
  { slot_id: "S1", label: "S1", state: "FREE", next_reservation_window: null },
  { slot_id: "S2", label: "S2", state: "RESERVED", next_reservation_window: null },
  { slot_id: "S3", label: "S3", state: "OCCUPIED", next_reservation_window: null },
  { slot_id: "S4", label: "S4", state: "OUT_OF_SERVICE", next_reservation_window: null },
];

export const LOT_FIXTURE = {
  lot_id: "L1",
  name: "Central",
  lat: 31.416,
  lon: 31.814,
  occupancy: { free: 1, reserved: 1, occupied: 1, out_of_service: 1, total: 4 },
  extras: [{ code: "wash", name: "Car wash", price_minor: 500 }],
  tariff: { rate_minor_per_quantum: 250, quantum_minutes: 15, currency_code: "USD" },
};
