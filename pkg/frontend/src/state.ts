// Auth token lives in memory and session storage; everything else is
// page-local.

const TOKEN_KEY = "spms_token";

let token: string | null = null;

export function getToken(): string | null {
  if (token === null) {
    try {
      token = window.sessionStorage.getItem(TOKEN_KEY);
    } catch {
      token = null;
    }
  }
  return token;
}

export function setToken(value: string): void {
  token = value;
  try {
    window.sessionStorage.setItem(TOKEN_KEY, value);
  } catch {
    // storage may be unavailable; the in-memory copy still works
  }
}

export function clearToken(): void {
  token = null;
  try {
    window.sessionStorage.removeItem(TOKEN_KEY);
  } catch {
    // ignore
  }
}

export function isAuthenticated(): boolean {
  return getToken() !== null;
}
