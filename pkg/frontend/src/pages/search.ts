import { ApiClient, ApiError } from "../api.js";
import { el } from "../dom.js";
import type { Page } from "../router.js";

// Default preset: numeric coordinates, no maps integration.
const DEFAULT_LAT = "31.416";
const DEFAULT_LON = "31.814";
const DEFAULT_RADIUS_M = "5000";

export class SearchPage implements Page {
  constructor(private api: ApiClient) {}

  render(root: HTMLElement): void {
    const lat = el("input", { name: "lat", type: "number", step: "any", value: DEFAULT_LAT });
    const lon = el("input", { name: "lon", type: "number", step: "any", value: DEFAULT_LON });
    const radius = el("input", { name: "radius_m", type: "number", value: DEFAULT_RADIUS_M });
    const results = el("div", { id: "lot-results" });
    const form = el(
      "form",
      { id: "search-form" },
      el("h2", {}, "Find parking"),
      el("label", {}, "Latitude ", lat),
      el("label", {}, "Longitude ", lon),
      el("label", {}, "Radius (m) ", radius),
      el("button", { type: "submit" }, "Search"),
    );
    const search = async () => {
      try {
        const lots = await this.api.searchLots(
          Number(lat.value),
          Number(lon.value),
          Number(radius.value),
        );
        results.replaceChildren();
        if (lots.length === 0) {
          results.append(el("p", { class: "empty-state" }, "No lots within this radius."));
          return;
        }
        for (const lot of lots) {
          const occupancy = lot.occupancy;
          results.append(
            el(
              "div",
              { class: "lot-card" },
              el("a", { href: `#/lots/${lot.lot_id}`, class: "lot-name" }, lot.name),
              el("span", { class: "lot-distance" }, ` ${Math.round(lot.distance_m)} m`),
              el(
                "span",
                { class: "badges" },
                el("span", { class: "badge badge-free" }, `free ${occupancy.free}`),
                el("span", { class: "badge badge-reserved" }, `reserved ${occupancy.reserved}`),
                el("span", { class: "badge badge-occupied" }, `occupied ${occupancy.occupied}`),
              ),
            ),
          );
        }
      } catch (err) {
        if (err instanceof ApiError) {
          results.replaceChildren(el("p", { class: "form-error" }, err.message));
        } else {
          throw err;
        }
      }
    };
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void search();
    });
    root.append(form, results);
    void search();
  }
}
