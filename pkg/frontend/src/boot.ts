import { ApiClient } from "./api.js";
import { createController } from "./main.js";

// Browser entry point; the API host defaults to the local dev server
// and can be overridden with ?api=<base-url>.
const apiBase =
  new URLSearchParams(window.location.search).get("api") ?? "http://localhost:8000";
const root = document.getElementById("app");
if (root !== null) {
  const controller = createController(root, new ApiClient(apiBase));
  controller.ready.catch((err) => {
    console.error("startup failed", err);
  });
}
