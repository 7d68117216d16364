// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import { App } from "../src/app.js";
import { highlighted } from "../src/highlight.js";
import type { SessionInfo } from "../src/types.js";
import { MAVG_ANSWERS, MAVG_SESSION } from "./fixtures.js";
import { MockService, settle } from "./mock.js";

let container: HTMLElement;
let toast: HTMLElement;

beforeEach(() => {
  document.body.textContent = "";
  container = document.createElement("div");
  toast = document.createElement("div");
  document.body.append(container, toast);
});

function setup(
  session: SessionInfo = MAVG_SESSION,
  answers: Record<string, number[]> = MAVG_ANSWERS,
): { app: App; service: MockService } {
  const service = new MockService(session, answers);
  const app = new App(service, container, toast, session);
  return { app, service };
}

function classesAt(addr: number): string[] {
  const node = container.querySelector(`[data-addr="${addr}"]`);
  return node ? [...node.classList].sort() : [];
}

describe("hovering an input cell", () => {
  it("marks the outputs it feeds and the inputs those outputs also need", async () => {
    const { app } = setup();
    await app.hover(4); // the 37.14 cell
    // direct answer: the chart points this cell flows into
    expect(highlighted(container, "hl-primary")).toEqual([58, 64]);
    // cognate cells: everything those points also demand, minus the origin
    expect(highlighted(container, "hl-linked")).toEqual([0, 2, 6]);
    expect(classesAt(4)).toEqual(["hl-origin"]);
  });

  it("asks the service exactly one direct and one composed query", async () => {
    const { app, service } = setup();
    await app.hover(4);
    expect(service.calls).toEqual([
      { op: "demandedBy", selection: [4], restrict: "outputs" },
      { op: "linkedInputs", selection: [4], restrict: "inputs" },
    ]);
  });

  it("paints the service's answers verbatim, deriving nothing itself", async () => {
    const { app } = setup();
    await app.hover(4);
    expect(highlighted(container, "hl-primary")).toEqual(
      MAVG_ANSWERS["demandedBy|4|outputs"],
    );
    expect(highlighted(container, "hl-linked")).toEqual(
      MAVG_ANSWERS["linkedInputs|4|inputs"]!.filter((a) => a !== 4),
    );
  });

  it("clears on mouse-out", async () => {
    const { app } = setup();
    await app.hover(4);
    app.unhover();
    for (const cls of ["hl-origin", "hl-primary", "hl-linked"]) {
      expect(highlighted(container, cls)).toEqual([]);
    }
  });
});

describe("hovering an output point", () => {
  it("uses the mirror query pair", async () => {
    const { app, service } = setup();
    await app.hover(64);
    expect(service.calls).toEqual([
      { op: "demands", selection: [64], restrict: "inputs" },
      { op: "linkedOutputs", selection: [64], restrict: "outputs" },
    ]);
    expect(highlighted(container, "hl-primary")).toEqual([2, 4, 6]);
    expect(highlighted(container, "hl-linked")).toEqual([52, 58]);
    expect(classesAt(64)).toEqual(["hl-origin"]);
  });
});

describe("click pinning", () => {
  it("keeps the pinned layer after the pointer leaves", async () => {
    const { app } = setup();
    await app.click(4);
    app.unhover();
    expect(highlighted(container, "pin-origin")).toEqual([4]);
    expect(highlighted(container, "pin-primary")).toEqual([58, 64]);
    expect(highlighted(container, "pin-linked")).toEqual([0, 2, 6]);
  });

  it("lets a hover overlay the pin without clearing it", async () => {
    const { app } = setup();
    await app.click(4);
    await app.hover(64);
    // both layers visible at once
    expect(highlighted(container, "pin-primary")).toEqual([58, 64]);
    expect(highlighted(container, "hl-primary")).toEqual([2, 4, 6]);
    // 64 is pinned-primary and hover-origin simultaneously
    expect(classesAt(64)).toEqual(["hl-origin", "pin-primary"]);
    app.unhover();
    expect(highlighted(container, "hl-origin")).toEqual([]);
    expect(highlighted(container, "pin-primary")).toEqual([58, 64]);
  });

  it("unpins on a second click of the same origin without another query", async () => {
    const { app, service } = setup();
    await app.click(4);
    const callsAfterPin = service.calls.length;
    await app.click(4);
    expect(service.calls.length).toBe(callsAfterPin);
    expect(highlighted(container, "pin-origin")).toEqual([]);
  });

  it("moves the pin when a different origin is clicked", async () => {
    const { app } = setup();
    await app.click(4);
    await app.click(6);
    expect(highlighted(container, "pin-origin")).toEqual([6]);
    expect(highlighted(container, "pin-primary")).toEqual([64]);
  });
});

describe("in-flight queries", () => {
  it("drops a slow answer once a newer hover has landed", async () => {
    const { app, service } = setup();
    service.deferred = true;
    const first = app.hover(4);
    const second = app.hover(0);
    // the newer hover's answers arrive first…
    await service.release((k) => k === "demandedBy|0|outputs");
    await service.release((k) => k === "linkedInputs|0|inputs");
    // …then the stale ones
    await service.release((k) => k === "demandedBy|4|outputs");
    await service.release((k) => k === "linkedInputs|4|inputs");
    await Promise.all([first, second]);
    expect(app.state.transient?.origin).toBe(0);
    expect(highlighted(container, "hl-origin")).toEqual([0]);
    expect(highlighted(container, "hl-primary")).toEqual([52, 58]);
    expect(highlighted(container, "hl-linked")).toEqual([2, 4]);
  });

  it("ignores answers that arrive after the pointer already left", async () => {
    const { app, service } = setup();
    service.deferred = true;
    const inflight = app.hover(4);
    app.unhover();
    await service.releaseAll();
    await inflight;
    expect(app.state.transient).toBeNull();
    expect(highlighted(container, "hl-origin")).toEqual([]);
  });
});

describe("failures", () => {
  it("shows a toast and clears the hover layer when a query fails", async () => {
    const { app, service } = setup();
    await app.hover(4);
    service.failWith = "connection refused";
    await app.hover(6);
    expect(toast.dataset.visible).toBe("true");
    expect(toast.textContent).toBe("query failed: connection refused");
    expect(highlighted(container, "hl-origin")).toEqual([]);
    expect(highlighted(container, "hl-primary")).toEqual([]);
  });

  it("clears the toast once a later query succeeds", async () => {
    const { app, service } = setup();
    service.failWith = "connection refused";
    await app.hover(4);
    service.failWith = null;
    await app.hover(4);
    expect(toast.dataset.visible).toBeUndefined();
    expect(toast.textContent).toBe("");
    expect(highlighted(container, "hl-origin")).toEqual([4]);
  });

  it("leaves an existing pin alone when a click-query fails", async () => {
    const { app, service } = setup();
    await app.click(4);
    service.failWith = "boom";
    await app.click(6);
    expect(highlighted(container, "pin-origin")).toEqual([4]);
    expect(toast.textContent).toBe("query failed: boom");
  });
});

// a fifth row whose cell no output consumes
const EXT_SESSION: SessionInfo = {
  id: "fixture-ext",
  view: {
    tables: [
      {
        ...MAVG_SESSION.view.tables[0]!,
        rows: [
          ...MAVG_SESSION.view.tables[0]!.rows,
          [{ addr: 99, value: 3.5 }],
        ],
        row_addrs: [...MAVG_SESSION.view.tables[0]!.row_addrs, 101],
      },
    ],
    charts: MAVG_SESSION.view.charts,
  },
  inputs: [
    ...MAVG_SESSION.inputs,
    { path: "data[4].emissions", addr: 99, kind: "cell" },
  ],
};

function rowHidden(cellAddr: number): boolean {
  const td = container.querySelector(`td[data-addr="${cellAddr}"]`);
  return (td!.closest("tr") as HTMLTableRowElement).hidden;
}

describe("row filters", () => {
  it("used-only hides rows no output demands, after a single fetch", async () => {
    const { app, service } = setup(EXT_SESSION);
    await app.setFilter("used-only");
    expect(rowHidden(0)).toBe(false);
    expect(rowHidden(6)).toBe(false);
    expect(rowHidden(99)).toBe(true);
    await app.setFilter("all");
    expect(rowHidden(99)).toBe(false);
    await app.setFilter("used-only"); // cached — no second fetch
    const demandsCalls = service.calls.filter((c) => c.op === "demands");
    expect(demandsCalls).toEqual([
      { op: "demands", selection: [52, 58, 64], restrict: "inputs" },
    ]);
  });

  it("selected-only shows just rows touched by the live layers", async () => {
    const { app } = setup(EXT_SESSION);
    await app.click(4);
    await app.setFilter("selected-only");
    expect(rowHidden(0)).toBe(false); // linked
    expect(rowHidden(4)).toBe(false); // origin
    expect(rowHidden(99)).toBe(true); // untouched
  });

  it("keeps every mavg row under used-only (all four cells are consumed)", async () => {
    const { app } = setup();
    await app.setFilter("used-only");
    for (const addr of [0, 2, 4, 6]) {
      expect(rowHidden(addr)).toBe(false);
    }
  });
});

describe("event wiring", () => {
  function fire(addr: number, type: string): void {
    const node = container.querySelector(`[data-addr="${addr}"]`)!;
    node.dispatchEvent(new MouseEvent(type, { bubbles: true }));
  }

  it("drives hover, leave, and click through real DOM events", async () => {
    const { app } = setup();
    app.wire();
    fire(4, "mouseover");
    await settle();
    expect(highlighted(container, "hl-origin")).toEqual([4]);
    expect(highlighted(container, "hl-primary")).toEqual([58, 64]);
    fire(4, "mouseout");
    await settle();
    expect(highlighted(container, "hl-origin")).toEqual([]);
    fire(4, "click");
    await settle();
    expect(highlighted(container, "pin-origin")).toEqual([4]);
    expect(highlighted(container, "pin-linked")).toEqual([0, 2, 6]);
  });

  it("ignores events outside addressed elements", async () => {
    const { app, service } = setup();
    app.wire();
    const header = container.querySelector("th")!;
    header.dispatchEvent(new MouseEvent("mouseover", { bubbles: true }));
    await settle();
    expect(service.calls).toEqual([]);
  });
});
