import { ApiClient, ApiError, SLOT_STATES } from "../api.js";
import type { ExtraService, Reservation, SlotView } from "../api.js";
import { el } from "../dom.js";
import { formatMinor } from "../money.js";
import type { Page } from "../router.js";
import { describeError, validateWindow } from "../validate.js";

export const POLL_MS = 2000;
// Grid older than two polling intervals shows the staleness banner.
export const STALE_AFTER_MS = 2 * POLL_MS;

function toEpochSeconds(datetimeLocal: string): number {
  return Math.floor(new Date(datetimeLocal).getTime() / 1000);
}

function idempotencyKey(): string {
  return (
    globalThis.crypto?.randomUUID?.() ??
    `k-${Date.now()}-${Math.random().toString(36).slice(2)}`
  );
}

function toDatetimeLocal(epochSeconds: number): string {
  const date = new Date(epochSeconds * 1000);
  const pad = (n: number) => String(n).padStart(2, "0");
  return (
    `${date.getFullYear()}-${pad(date.getMonth() + 1)}-${pad(date.getDate())}` +
    `T${pad(date.getHours())}:${pad(date.getMinutes())}`
  );
}

export class SlotsPage implements Page {
  private timer: number | null = null;
  private inFlight = false;
  private latestApplied = 0;
  private lastSuccess = 0;
  private disposed = false;

  private grid = el("div", { id: "slot-grid" });
  private banner = el("div", { id: "stale-banner", class: "banner", hidden: true },
    "Live data is stale; reconnecting…");
  private confirmBox = el("div", { id: "booking-confirm" });
  private extrasBox = el("div", { id: "extras-box" });
  private slotSelect = el("select", { name: "slot" });
  private extras: ExtraService[] = [];

  constructor(
    private api: ApiClient,
    private lotId: string,
  ) {}

  render(root: HTMLElement): void {
    const title = el("h2", { id: "lot-title" }, this.lotId);
    const start = el("input", {
      name: "window_start",
      type: "datetime-local",
      value: toDatetimeLocal(Math.floor(Date.now() / 1000) + 30 * 60),
    });
    const end = el("input", {
      name: "window_end",
      type: "datetime-local",
      value: toDatetimeLocal(Math.floor(Date.now() / 1000) + 2 * 3600),
    });
    const error = el("p", { class: "form-error", id: "booking-error" });
    const form = el(
      "form",
      { id: "booking-form" },
      el("h3", {}, "Book a slot"),
      el("label", {}, "Slot ", this.slotSelect),
      el("label", {}, "From ", start),
      el("label", {}, "Until ", end),
      this.extrasBox,
      el("button", { type: "submit" }, "Book"),
      error,
    );
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      error.textContent = "";
      const startSec = toEpochSeconds(start.value);
      const endSec = toEpochSeconds(end.value);
      // Advisory pre-check; the API enforces the same rule with the same code.
      const invalid = validateWindow(startSec, endSec, Math.floor(Date.now() / 1000));
      if (invalid) {
        error.textContent = describeError(invalid, invalid);
        error.dataset.code = invalid;
        return;
      }
      const chosenExtras = [
        ...this.extrasBox.querySelectorAll<HTMLInputElement>("input:checked"),
      ].map((box) => box.value);
      try {
        const reservation = await this.api.createReservation(
          {
            lot_id: this.lotId,
            slot_id: this.slotSelect.value === "any" ? null : this.slotSelect.value,
            window_start: startSec,
            window_end: endSec,
            extras: chosenExtras,
          },
          idempotencyKey(),
        );
        this.showConfirmation(reservation);
      } catch (err) {
        if (err instanceof ApiError) {
          // 409/422 render inline; form inputs stay as typed.
          error.textContent = describeError(err.code, err.message);
          error.dataset.code = err.code;
        } else {
          throw err;
        }
      }
    });

    root.append(title, this.banner, this.grid, this.confirmBox, form);
    void this.loadLot(title);
    this.pollLoop();
  }

  dispose(): void {
    this.disposed = true;
    if (this.timer !== null) window.clearTimeout(this.timer);
  }

  private async loadLot(title: HTMLElement): Promise<void> {
    try {
      const lot = await this.api.getLot(this.lotId);
      title.textContent = lot.name;
      this.extras = lot.extras;
      this.extrasBox.replaceChildren(
        ...lot.extras.map((extra) =>
          el(
            "label",
            { class: "extra-option" },
            el("input", { type: "checkbox", value: extra.code }),
            ` ${extra.name} (${formatMinor(extra.price_minor, lot.tariff.currency_code ?? "USD")})`,
          ),
        ),
      );
    } catch {
      // lot header is cosmetic; the grid poll reports real connectivity
    }
  }

  private pollLoop(): void {
    if (this.disposed) return;
    void this.tick();
    this.updateStaleness();
    this.timer = window.setTimeout(() => this.pollLoop(), POLL_MS);
  }

  private async tick(): Promise<void> {
    if (this.inFlight) return; // at most one in-flight poll
    this.inFlight = true;
    const startedAt = Date.now();
    try {
      const slots = await this.api.listSlots(this.lotId);
      if (this.disposed) return;
      if (startedAt >= this.latestApplied) {
        // Responses that raced an older request are discarded.
        this.latestApplied = startedAt;
        this.lastSuccess = Date.now();
        this.applySnapshot(slots);
      }
    } catch {
      // transient failure: the staleness banner covers it
    } finally {
      this.inFlight = false;
      this.updateStaleness();
    }
  }

  private updateStaleness(): void {
    const stale = this.lastSuccess === 0 || Date.now() - this.lastSuccess > STALE_AFTER_MS;
    this.banner.hidden = !stale;
  }

  private applySnapshot(slots: SlotView[]): void {
    const previousChoice = this.slotSelect.value;
    this.grid.replaceChildren(
      ...slots.map((slot) => {
        // Never display anything outside the 4-state vocabulary.
        const known = (SLOT_STATES as readonly string[]).includes(slot.state);
        const stateClass = known ? `slot-${slot.state.toLowerCase()}` : "slot-invalid";
        const stateText = known ? slot.state : "?";
        return el(
          "div",
          { class: `slot-cell ${stateClass}`, "data-slot-id": slot.slot_id },
          el("span", { class: "slot-label" }, slot.label),
          el("span", { class: "slot-state" }, stateText),
        );
      }),
    );
    this.slotSelect.replaceChildren(
      el("option", { value: "any" }, "any free slot"),
      ...slots.map((slot) => el("option", { value: slot.slot_id }, slot.slot_id)),
    );
    if ([...this.slotSelect.options].some((option) => option.value === previousChoice)) {
      this.slotSelect.value = previousChoice;
    }
  }

  private showConfirmation(reservation: Reservation): void {
    const names = new Map(this.extras.map((extra) => [extra.code, extra.name]));
    const extrasText =
      reservation.extra_codes.length > 0
        ? `, extras: ${reservation.extra_codes.map((code) => names.get(code) ?? code).join(", ")}`
        : "";
    this.confirmBox.replaceChildren(
      el(
        "div",
        { class: "confirm" },
        el("strong", {}, `Booking ${reservation.reservation_id} confirmed`),
        el(
          "p",
          {},
          `Slot ${reservation.slot_id}, ` +
            `${new Date(reservation.window_start * 1000).toLocaleString()} to ` +
            `${new Date(reservation.window_end * 1000).toLocaleString()}${extrasText}. ` +
            "The booking details were sent to you.",
        ),
        el("a", { href: "#/me" }, "My reservations"),
      ),
    );
  }
}
