/** View state: two highlight layers (transient hover, persistent click)
 * and a row-filter mode.  Layers hold the service's answer sets verbatim;
 * nothing in here derives provenance on its own. */

import type { InputEntry, View } from "./types.js";

export interface HighlightLayer {
  /** The hovered/clicked element. */
  origin: number;
  /** The direct query answer (demandedBy for inputs, demands for outputs). */
  primary: ReadonlySet<number>;
  /** The cognate set from the composing round trip. */
  linked: ReadonlySet<number>;
}

export type RowFilter = "all" | "used-only" | "selected-only";

export interface ViewState {
  sessionId: string;
  view: View;
  /** Dataset scalar cells: the addresses hover treats as inputs. */
  inputCells: ReadonlySet<number>;
  transient: HighlightLayer | null;
  persistent: HighlightLayer | null;
  rowFilter: RowFilter;
  /** Input cells some output actually uses; fetched once, per the service. */
  usedInputs: ReadonlySet<number> | null;
}

export function initialState(
  sessionId: string,
  view: View,
  inputs: InputEntry[],
): ViewState {
  return {
    sessionId,
    view,
    inputCells: new Set(
      inputs.filter((e) => e.kind === "cell").map((e) => e.addr),
    ),
    transient: null,
    persistent: null,
    rowFilter: "all",
    usedInputs: null,
  };
}

/** A new hover replaces the transient layer; the persistent one is untouched. */
export function setTransient(
  state: ViewState,
  layer: HighlightLayer | null,
): ViewState {
  return { ...state, transient: layer };
}

/** Clicking the pinned origin unpins it; any other layer replaces it. */
export function togglePersistent(
  state: ViewState,
  layer: HighlightLayer,
): ViewState {
  if (state.persistent && state.persistent.origin === layer.origin) {
    return { ...state, persistent: null };
  }
  return { ...state, persistent: layer };
}

export function setRowFilter(state: ViewState, mode: RowFilter): ViewState {
  return { ...state, rowFilter: mode };
}

/** Addresses appearing in any active layer (origin, primary, or linked). */
export function selectedAddrs(state: ViewState): Set<number> {
  const out = new Set<number>();
  for (const layer of [state.transient, state.persistent]) {
    if (!layer) continue;
    out.add(layer.origin);
    for (const a of layer.primary) out.add(a);
    for (const a of layer.linked) out.add(a);
  }
  return out;
}

/** The inflation sanity check: an input's linked set should contain it
 * (it feeds what it feeds).  False flags a cell no output consumes. */
export function roundTripConsistent(layer: HighlightLayer): boolean {
  return layer.linked.has(layer.origin);
}

/** Whether a table row (its cell addresses) is visible under the filter. */
export function rowVisible(state: ViewState, cellAddrs: number[]): boolean {
  if (state.rowFilter === "all") return true;
  if (state.rowFilter === "used-only") {
    if (state.usedInputs === null) return true; // not fetched yet
    return cellAddrs.some((a) => state.usedInputs!.has(a));
  }
  const selected = selectedAddrs(state);
  return cellAddrs.some((a) => selected.has(a));
}
