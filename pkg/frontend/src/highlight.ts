/** Paint highlight layers onto the rendered view.
 *
 * Legend (documented in the README): the hover layer uses `hl-*`, the
 * click-pinned layer `pin-*`; within each, `-origin` marks the element
 * the query started from, `-primary` its direct answer set, `-linked`
 * the cognate set.  The two layers are independent, so pinned classes
 * survive any amount of hovering elsewhere. */

import { rowVisible, type HighlightLayer, type ViewState } from "./state.js";

const CLASSES = [
  "hl-origin",
  "hl-primary",
  "hl-linked",
  "pin-origin",
  "pin-primary",
  "pin-linked",
];

function paintLayer(
  byAddr: Map<number, Element[]>,
  layer: HighlightLayer,
  prefix: "hl" | "pin",
): void {
  const mark = (addr: number, cls: string) => {
    for (const node of byAddr.get(addr) ?? []) node.classList.add(cls);
  };
  mark(layer.origin, `${prefix}-origin`);
  for (const addr of layer.primary) mark(addr, `${prefix}-primary`);
  for (const addr of layer.linked) {
    if (addr !== layer.origin) mark(addr, `${prefix}-linked`);
  }
}

/** Reapply all highlight classes and the row filter from scratch. */
export function applyHighlights(container: HTMLElement, state: ViewState): void {
  const byAddr = new Map<number, Element[]>();
  for (const node of container.querySelectorAll("[data-addr]")) {
    node.classList.remove(...CLASSES);
    const addr = Number((node as HTMLElement).dataset.addr);
    const bucket = byAddr.get(addr);
    if (bucket) bucket.push(node);
    else byAddr.set(addr, [node]);
  }
  if (state.persistent) paintLayer(byAddr, state.persistent, "pin");
  if (state.transient) paintLayer(byAddr, state.transient, "hl");

  for (const row of container.querySelectorAll("tbody tr")) {
    const cellAddrs = Array.from(row.querySelectorAll("[data-addr]")).map(
      (td) => Number((td as HTMLElement).dataset.addr),
    );
    (row as HTMLElement).hidden = !rowVisible(state, cellAddrs);
  }
}

/** Addresses currently carrying a class from either layer (for tests). */
export function highlighted(container: HTMLElement, cls: string): number[] {
  return Array.from(container.querySelectorAll(`.${cls}`))
    .map((node) => Number((node as HTMLElement).dataset.addr))
    .sort((a, b) => a - b);
}
