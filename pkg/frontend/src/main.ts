/** Browser entry point: a small form that creates a session and hands
 * the view to the controller.  The service base URL is the page's only
 * configuration (``?service=…`` or the input field). */

import { HttpService } from "./api.js";
import { App } from "./app.js";
import type { RowFilter } from "./state.js";

const DEFAULT_BASE = "http://127.0.0.1:8000";

function must<T extends Element>(root: Document, selector: string): T {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node as T;
}

export function boot(doc: Document): void {
  const baseInput = must<HTMLInputElement>(doc, "#service-url");
  baseInput.value =
    new URL(doc.location.href).searchParams.get("service") ?? DEFAULT_BASE;
  const source = must<HTMLTextAreaElement>(doc, "#program");
  const dataName = must<HTMLInputElement>(doc, "#dataset-name");
  const dataText = must<HTMLTextAreaElement>(doc, "#dataset-csv");
  const runButton = must<HTMLButtonElement>(doc, "#run");
  const filter = must<HTMLSelectElement>(doc, "#row-filter");
  const container = must<HTMLElement>(doc, "#view");
  const toast = must<HTMLElement>(doc, "#toast");

  let app: App | null = null;
  runButton.addEventListener("click", async () => {
    const service = new HttpService(baseInput.value.replace(/\/$/, ""));
    const datasets: Record<string, unknown> = {};
    if (dataName.value.trim()) datasets[dataName.value.trim()] = dataText.value;
    try {
      const session = await service.createSession(source.value, datasets);
      app = new App(service, container, toast, session);
      app.wire();
    } catch (err) {
      toast.textContent = `session failed: ${err instanceof Error ? err.message : err}`;
      toast.dataset.visible = "true";
    }
  });
  filter.addEventListener("change", () => {
    void app?.setFilter(filter.value as RowFilter);
  });
}

if (typeof document !== "undefined" && document.querySelector("#view")) {
  boot(document);
}
