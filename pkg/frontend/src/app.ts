import { ApiClient } from "./api.js";
import { el } from "./dom.js";
import { LoginPage } from "./pages/login.js";
import { MePage } from "./pages/me.js";
import { RegisterPage } from "./pages/register.js";
import { ResetPage } from "./pages/reset.js";
import { SearchPage } from "./pages/search.js";
import { SlotsPage } from "./pages/slots.js";
import { Router } from "./router.js";
import { clearToken, getToken, isAuthenticated } from "./state.js";

export function createApp(root: HTMLElement, baseUrl = ""): Router {
  const api = new ApiClient(baseUrl, getToken);

  const nav = el(
    "nav",
    { id: "topnav" },
    el("a", { href: "#/search" }, "Search"),
    " ",
    el("a", { href: "#/me" }, "My reservations"),
    " ",
    el("a", { href: "#/login", id: "logout-link", onclick: () => clearToken() }, "Log out"),
  );
  const main = el("main", { id: "main" });
  root.replaceChildren(el("h1", {}, "Smart Parking"), nav, main);

  const router = new Router(
    main,
    [
      { pattern: /^#\/login$/, requiresAuth: false, make: () => new LoginPage(api) },
      { pattern: /^#\/register$/, requiresAuth: false, make: () => new RegisterPage(api) },
      { pattern: /^#\/reset$/, requiresAuth: false, make: () => new ResetPage(api) },
      { pattern: /^#\/search$/, requiresAuth: true, make: () => new SearchPage(api) },
      {
        pattern: /^#\/lots\/([^/]+)$/,
        requiresAuth: true,
        make: (params) => new SlotsPage(api, params[0] ?? ""),
      },
      { pattern: /^#\/me$/, requiresAuth: true, make: () => new MePage(api) },
    ],
    () => {
      nav.hidden = !isAuthenticated();
    },
  );
  router.start();
  return router;
}
