// Hash router. Authenticated routes never render without a token; they
// bounce to #/login instead.

import { isAuthenticated } from "./state.js";

export interface Page {
  render(root: HTMLElement): void;
  dispose?(): void;
}

export interface Route {
  pattern: RegExp; // e.g. ^#/lots/([^/]+)$
  requiresAuth: boolean;
  make(params: string[]): Page;
}

export class Router {
  private current: Page | null = null;

  constructor(
    private root: HTMLElement,
    private routes: Route[],
    private onNavigate: () => void = () => {},
  ) {}

  start(): void {
    window.addEventListener("hashchange", () => this.apply());
    this.apply();
  }

  apply(): void {
    const hash = window.location.hash || "#/login";
    for (const route of this.routes) {
      const match = route.pattern.exec(hash);
      if (!match) continue;
      if (route.requiresAuth && !isAuthenticated()) {
        window.location.hash = "#/login";
        return;
      }
      this.swap(route.make(match.slice(1)));
      this.onNavigate();
      return;
    }
    window.location.hash = isAuthenticated() ? "#/search" : "#/login";
  }

  private swap(page: Page): void {
    this.current?.dispose?.();
    this.current = page;
    this.root.replaceChildren();
    page.render(this.root);
  }

  dispose(): void {
    this.current?.dispose?.();
    this.current = null;
  }
}
