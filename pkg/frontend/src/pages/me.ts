import { ApiClient, ApiError } from "../api.js";
import type { Reservation } from "../api.js";
import { el } from "../dom.js";
import { formatMoney } from "../money.js";
import type { Page } from "../router.js";

export class MePage implements Page {
  private list = el("div", { id: "reservation-list" });

  constructor(private api: ApiClient) {}

  render(root: HTMLElement): void {
    root.append(el("h2", {}, "My reservations"), this.list);
    void this.refresh();
  }

  private async refresh(): Promise<void> {
    const reservations = await this.api.myReservations();
    this.list.replaceChildren();
    if (reservations.length === 0) {
      this.list.append(el("p", { class: "empty-state" }, "No reservations yet."));
      return;
    }
    for (const reservation of reservations) {
      this.list.append(await this.card(reservation));
    }
  }

  private async card(reservation: Reservation): Promise<HTMLElement> {
    const card = el(
      "div",
      { class: "reservation-card", "data-reservation-id": reservation.reservation_id },
      el("span", { class: `chip chip-${reservation.state.toLowerCase()}` }, reservation.state),
      el(
        "span",
        { class: "reservation-summary" },
        ` ${reservation.lot_id}/${reservation.slot_id} · ` +
          `${new Date(reservation.window_start * 1000).toLocaleString()} to ` +
          `${new Date(reservation.window_end * 1000).toLocaleString()}`,
      ),
    );
    if (reservation.state === "ACTIVE") {
      const cancel = el("button", { class: "cancel-button" }, "Cancel");
      cancel.addEventListener("click", async () => {
        try {
          await this.api.cancelReservation(reservation.reservation_id);
          await this.refresh();
        } catch (err) {
          if (err instanceof ApiError) {
            card.append(el("span", { class: "form-error" }, err.message));
          } else {
            throw err;
          }
        }
      });
      card.append(cancel);
    }
    if (reservation.state === "COMPLETED" && reservation.bill_id) {
      const bill = await this.api.getBill(reservation.bill_id);
      card.append(
        el(
          "div",
          { class: "bill" },
          el("span", {}, `${bill.duration_minutes} min`),
          el("span", { class: "bill-base" }, ` parking ${formatMoney(bill.base_fee)}`),
          el("span", { class: "bill-extras" }, ` extras ${formatMoney(bill.extras_fee)}`),
          el("strong", { class: "bill-total" }, ` total ${formatMoney(bill.total)}`),
        ),
      );
    }
    return card;
  }
}
