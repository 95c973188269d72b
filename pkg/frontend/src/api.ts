// Typed client for the parking service API (v1). Errors carry the stable
// machine code the backend returns, so pages can map them to fields.

export type SlotState = "FREE" | "RESERVED" | "OCCUPIED" | "OUT_OF_SERVICE";

export const SLOT_STATES: readonly SlotState[] = [
  "FREE",
  "RESERVED",
  "OCCUPIED",
  "OUT_OF_SERVICE",
];

export interface Money {
  amount_minor: number;
  currency: string;
}

export interface Occupancy {
  free: number;
  reserved: number;
  occupied: number;
  out_of_service: number;
  total: number;
}

export interface ExtraService {
  code: string;
  name: string;
  price_minor: number;
}

export interface LotSummary {
  lot_id: string;
  name: string;
  lat: number;
  lon: number;
  distance_m: number;
  occupancy: Occupancy;
  extras: ExtraService[];
}

export interface LotDetail {
  lot_id: string;
  name: string;
  lat: number;
  lon: number;
  occupancy: Occupancy;
  extras: ExtraService[];
  tariff: {
    rate_minor_per_quantum: number;
    quantum_minutes: number;
    currency_code?: string;
  };
}

export interface SlotView {
  slot_id: string;
  label: string;
  state: SlotState;
  next_reservation_window: { window_start: number; window_end: number } | null;
}

export interface Reservation {
  reservation_id: string;
  user_id: string;
  lot_id: string;
  slot_id: string;
  window_start: number;
  window_end: number;
  state: "ACTIVE" | "CHECKED_IN" | "COMPLETED" | "CANCELLED" | "EXPIRED";
  created_at: number;
  hold_deadline: number;
  eta: number | null;
  extra_codes: string[];
  session_id: string | null;
  bill_id: string | null;
}

export interface Bill {
  bill_id: string;
  session_id: string;
  duration_minutes: number;
  base_fee: Money;
  extras_fee: Money;
  total: Money;
  issued_at: number;
}

export interface AuthSession {
  token: string;
  user_id: string;
  expires_at: number;
}

export interface BookingRequest {
  lot_id: string;
  slot_id?: string | null;
  window_start: number;
  window_end: number;
  eta?: number | null;
  extras?: string[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl = "",
    private getToken: () => string | null = () => null,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown, headers?: Record<string, string>): Promise<T> {
    const allHeaders: Record<string, string> = { ...headers };
    if (body !== undefined) allHeaders["Content-Type"] = "application/json";
    const token = this.getToken();
    if (token) allHeaders["Authorization"] = `Bearer ${token}`;
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method,
        headers: allHeaders,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, "network_error", String(err));
    }
    if (response.status === 204) return undefined as T;
    let payload: unknown;
    try {
      payload = await response.json();
    } catch {
      throw new ApiError(response.status, "bad_response", "response was not JSON");
    }
    if (!response.ok) {
      const detail = (payload as { error?: { code?: string; message?: string } }).error;
      throw new ApiError(
        response.status,
        detail?.code ?? "unknown_error",
        detail?.message ?? `HTTP ${response.status}`,
      );
    }
    return payload as T;
  }

  register(name: string, email: string, phone: string, password: string) {
    return this.request<{ user_id: string }>("POST", "/api/v1/users", {
      name,
      email,
      phone,
      password,
    });
  }

  login(email: string, password: string) {
    return this.request<AuthSession>("POST", "/api/v1/sessions", { email, password });
  }

  requestPasswordReset(email: string) {
    return this.request<{ status: string }>("POST", "/api/v1/password-resets", { email });
  }

  redeemPasswordReset(code: string, newPassword: string) {
    return this.request<{ status: string }>("POST", "/api/v1/password-resets/redeem", {
      code,
      new_password: newPassword,
    });
  }

  searchLots(lat: number, lon: number, radiusM: number) {
    const params = new URLSearchParams({
      lat: String(lat),
      lon: String(lon),
      radius_m: String(radiusM),
    });
    return this.request<LotSummary[]>("GET", `/api/v1/lots?${params}`);
  }

  getLot(lotId: string) {
    return this.request<LotDetail>("GET", `/api/v1/lots/${lotId}`);
  }

  listSlots(lotId: string) {
    return this.request<SlotView[]>("GET", `/api/v1/lots/${lotId}/slots`);
  }

  createReservation(booking: BookingRequest, idempotencyKey?: string) {
    const headers = idempotencyKey ? { "Idempotency-Key": idempotencyKey } : undefined;
    return this.request<Reservation>("POST", "/api/v1/reservations", booking, headers);
  }

  cancelReservation(reservationId: string) {
    return this.request<Reservation>("DELETE", `/api/v1/reservations/${reservationId}`);
  }

  myReservations() {
    return this.request<Reservation[]>("GET", "/api/v1/me/reservations");
  }

  getBill(billId: string) {
    return this.request<Bill>("GET", `/api/v1/bills/${billId}`);
  }
}
