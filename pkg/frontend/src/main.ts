import { createApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  // Served under /app by the parking service; the API shares the origin.
  createApp(root, "");
}
