import { describe, expect, it } from "vitest";

import {
  initialState,
  roundTripConsistent,
  rowVisible,
  selectedAddrs,
  setRowFilter,
  setTransient,
  togglePersistent,
  type HighlightLayer,
  type ViewState,
} from "../src/state.js";
import { MAVG_INPUTS, MAVG_VIEW } from "./fixtures.js";

function fresh(): ViewState {
  return initialState("s1", MAVG_VIEW, MAVG_INPUTS);
}

function layer(origin: number, primary: number[], linked: number[]): HighlightLayer {
  return { origin, primary: new Set(primary), linked: new Set(linked) };
}

describe("initial state", () => {
  it("collects only scalar cells as input addresses", () => {
    const state = fresh();
    expect([...state.inputCells].sort((a, b) => a - b)).toEqual([0, 2, 4, 6]);
    expect(state.inputCells.has(1)).toBe(false); // row records are nodes
    expect(state.inputCells.has(12)).toBe(false); // so are list spines
  });

  it("starts with no layers, no filter, no used-inputs cache", () => {
    const state = fresh();
    expect(state.transient).toBeNull();
    expect(state.persistent).toBeNull();
    expect(state.rowFilter).toBe("all");
    expect(state.usedInputs).toBeNull();
  });
});

describe("layer updates", () => {
  it("replaces the hover layer without touching the pinned one", () => {
    let state = fresh();
    const pinned = layer(4, [58, 64], [0, 2, 4, 6]);
    state = togglePersistent(state, pinned);
    state = setTransient(state, layer(64, [2, 4, 6], [52, 58, 64]));
    expect(state.persistent).toBe(pinned);
    expect(state.transient?.origin).toBe(64);
    state = setTransient(state, null);
    expect(state.transient).toBeNull();
    expect(state.persistent).toBe(pinned);
  });

  it("pins, re-pins elsewhere, and unpins on the same origin", () => {
    let state = fresh();
    state = togglePersistent(state, layer(4, [58, 64], [0, 2, 4, 6]));
    expect(state.persistent?.origin).toBe(4);
    state = togglePersistent(state, layer(6, [64], [2, 4, 6]));
    expect(state.persistent?.origin).toBe(6);
    state = togglePersistent(state, layer(6, [64], [2, 4, 6]));
    expect(state.persistent).toBeNull();
  });
});

describe("selection and consistency", () => {
  it("unions origin, primary, and linked across both layers", () => {
    let state = fresh();
    state = togglePersistent(state, layer(4, [58, 64], [0, 2, 4, 6]));
    state = setTransient(state, layer(52, [0, 2], [52, 58, 64]));
    expect([...selectedAddrs(state)].sort((a, b) => a - b)).toEqual([
      0, 2, 4, 6, 52, 58, 64,
    ]);
  });

  it("is empty with no layers", () => {
    expect(selectedAddrs(fresh()).size).toBe(0);
  });

  it("round-trip consistency means the linked set contains the origin", () => {
    expect(roundTripConsistent(layer(4, [58, 64], [0, 2, 4, 6]))).toBe(true);
    // a cell nothing demands comes back with an empty round trip
    expect(roundTripConsistent(layer(4, [], []))).toBe(false);
  });
});

describe("row filtering", () => {
  it("shows everything under the default filter", () => {
    const state = fresh();
    expect(rowVisible(state, [0])).toBe(true);
    expect(rowVisible(state, [999])).toBe(true);
  });

  it("used-only keeps rows with at least one consumed cell", () => {
    let state = setRowFilter(fresh(), "used-only");
    // until the answer arrives every row stays visible
    expect(rowVisible(state, [999])).toBe(true);
    state = { ...state, usedInputs: new Set([0, 2, 4, 6]) };
    expect(rowVisible(state, [0])).toBe(true);
    expect(rowVisible(state, [999])).toBe(false);
  });

  it("selected-only follows the live highlight union", () => {
    let state = setRowFilter(fresh(), "selected-only");
    expect(rowVisible(state, [0])).toBe(false); // nothing selected yet
    state = setTransient(state, layer(4, [58, 64], [0, 2, 4, 6]));
    expect(rowVisible(state, [0])).toBe(true);
    expect(rowVisible(state, [999])).toBe(false);
  });
});
