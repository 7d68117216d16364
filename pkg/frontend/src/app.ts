/** Controller: turns hover/click on addressed elements into service
 * queries and repaints the two highlight layers.
 *
 * Hovering an input cell asks "which outputs does this feed?"
 * (demandedBy) and then the cognacy round trip (linkedInputs); hovering
 * an output part asks the mirror pair (demands, linkedOutputs).  The
 * answer sets are stored verbatim — the client never derives provenance
 * itself.  In-flight hover queries are superseded by newer ones
 * (latest wins), and a failed query clears the hover layer and shows a
 * toast instead of leaving stale paint around. */

import { applyHighlights } from "./highlight.js";
import { render } from "./render.js";
import {
  initialState,
  setRowFilter,
  setTransient,
  togglePersistent,
  type HighlightLayer,
  type RowFilter,
  type ViewState,
} from "./state.js";
import type { QueryOp, Restrict, Service, SessionInfo } from "./types.js";

export class App {
  state: ViewState;
  private hoverSeq = 0;
  private clickSeq = 0;

  constructor(
    private readonly service: Service,
    private readonly container: HTMLElement,
    private readonly toast: HTMLElement,
    session: SessionInfo,
  ) {
    this.state = initialState(session.id, session.view, session.inputs);
    render(container, session.view);
    this.repaint();
  }

  private repaint(): void {
    applyHighlights(this.container, this.state);
  }

  private showToast(message: string): void {
    this.toast.textContent = message;
    this.toast.dataset.visible = "true";
  }

  private clearToast(): void {
    this.toast.textContent = "";
    delete this.toast.dataset.visible;
  }

  /** Both queries for one origin, picked by which side of the graph it's on. */
  private async layerFor(addr: number): Promise<HighlightLayer> {
    const isInput = this.state.inputCells.has(addr);
    const direct: [QueryOp, Restrict] = isInput
      ? ["demandedBy", "outputs"]
      : ["demands", "inputs"];
    const composed: [QueryOp, Restrict] = isInput
      ? ["linkedInputs", "inputs"]
      : ["linkedOutputs", "outputs"];
    const primary = await this.service.query(
      this.state.sessionId,
      direct[0],
      [addr],
      direct[1],
    );
    const linked = await this.service.query(
      this.state.sessionId,
      composed[0],
      [addr],
      composed[1],
    );
    return { origin: addr, primary: new Set(primary), linked: new Set(linked) };
  }

  async hover(addr: number): Promise<void> {
    const seq = ++this.hoverSeq;
    try {
      const layer = await this.layerFor(addr);
      if (seq !== this.hoverSeq) return; // a newer hover superseded this one
      this.clearToast();
      this.state = setTransient(this.state, layer);
    } catch (err) {
      if (seq !== this.hoverSeq) return;
      this.state = setTransient(this.state, null);
      this.showToast(`query failed: ${err instanceof Error ? err.message : err}`);
    }
    this.repaint();
  }

  unhover(): void {
    this.hoverSeq++; // invalidate anything still in flight
    this.state = setTransient(this.state, null);
    this.repaint();
  }

  async click(addr: number): Promise<void> {
    if (this.state.persistent?.origin === addr) {
      this.state = { ...this.state, persistent: null }; // unpin, no query
      this.repaint();
      return;
    }
    const seq = ++this.clickSeq;
    try {
      const layer = await this.layerFor(addr);
      if (seq !== this.clickSeq) return;
      this.clearToast();
      this.state = togglePersistent(this.state, layer);
    } catch (err) {
      if (seq !== this.clickSeq) return;
      this.showToast(`query failed: ${err instanceof Error ? err.message : err}`);
    }
    this.repaint();
  }

  async setFilter(mode: RowFilter): Promise<void> {
    if (mode === "used-only" && this.state.usedInputs === null) {
      // one fetch: the inputs the result actually consumes
      const outputs = this.chartPointAddrs();
      try {
        const used = await this.service.query(
          this.state.sessionId,
          "demands",
          outputs,
          "inputs",
        );
        this.state = { ...this.state, usedInputs: new Set(used) };
      } catch (err) {
        this.showToast(`query failed: ${err instanceof Error ? err.message : err}`);
        return;
      }
    }
    this.state = setRowFilter(this.state, mode);
    this.repaint();
  }

  private chartPointAddrs(): number[] {
    const out: number[] = [];
    for (const chart of this.state.view.charts) {
      for (const p of chart.points ?? []) out.push(p.addr);
    }
    return out;
  }

  /** Event delegation over everything carrying an address. */
  wire(): void {
    const addrOf = (target: EventTarget | null): number | null => {
      if (!(target instanceof Element)) return null;
      const node = target.closest("[data-addr]") as HTMLElement | null;
      return node ? Number(node.dataset.addr) : null;
    };
    this.container.addEventListener("mouseover", (ev) => {
      const addr = addrOf(ev.target);
      if (addr !== null) void this.hover(addr);
    });
    this.container.addEventListener("mouseout", (ev) => {
      if (addrOf(ev.target) !== null) this.unhover();
    });
    this.container.addEventListener("click", (ev) => {
      const addr = addrOf(ev.target);
      if (addr !== null) void this.click(addr);
    });
  }
}
