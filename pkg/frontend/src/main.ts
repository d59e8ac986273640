import { PlanServiceClient } from "./api.js";
import { CalculatorApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "http://127.0.0.1:8712";

const client = new PlanServiceClient(baseUrl);
const app = new CalculatorApp(client);
const root = document.querySelector("#app");
if (!(root instanceof HTMLElement)) {
  throw new Error("missing #app mount point");
}
app.mount(root);

void client.healthz().then((ok) => {
  if (!ok) {
    const warning = document.createElement("div");
    warning.className = "service-warning";
    warning.textContent =
      `Planning service unreachable at ${baseUrl} — start it with ` +
      "`predpower serve --port 8712` (override via ?service=http://host:port).";
    root.prepend(warning);
  }
});
