/** Render a session view into DOM: tables plus plain-SVG charts.
 * Every datum gets exactly one `data-addr`, so highlight classes can be
 * applied per address without any framework in between. */

import type { BarView, ChartView, PointView, TableView, View } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
export const CHART_WIDTH = 360;
export const CHART_HEIGHT = 160;
const PAD = 18;

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  cls?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (cls) node.className = cls;
  return node;
}

function renderTable(doc: Document, table: TableView): HTMLElement {
  const wrap = el(doc, "figure", "table-view");
  wrap.dataset.name = table.name;
  const t = el(doc, "table");
  const head = el(doc, "thead");
  const hrow = el(doc, "tr");
  for (const col of table.columns) {
    const th = el(doc, "th");
    th.textContent = col;
    hrow.appendChild(th);
  }
  head.appendChild(hrow);
  t.appendChild(head);
  const body = el(doc, "tbody");
  table.rows.forEach((cells, i) => {
    const tr = el(doc, "tr");
    const rowAddr = table.row_addrs[i];
    if (rowAddr !== undefined) tr.dataset.rowAddr = String(rowAddr);
    for (const cell of cells) {
      const td = el(doc, "td");
      td.dataset.addr = String(cell.addr);
      td.textContent = String(cell.value);
      tr.appendChild(td);
    }
    body.appendChild(tr);
  });
  t.appendChild(body);
  wrap.appendChild(t);
  return wrap;
}

function scale(
  values: number[],
  lo: number,
  hi: number,
): (v: number) => number {
  const min = Math.min(...values);
  const max = Math.max(...values);
  const span = max - min || 1;
  return (v) => lo + ((v - min) / span) * (hi - lo);
}

function renderPoints(
  doc: Document,
  chart: ChartView,
  points: PointView[],
): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${CHART_WIDTH} ${CHART_HEIGHT}`);
  svg.setAttribute("class", `chart chart-${chart.kind}`);
  const xs = points.map((p, i) => (typeof p.x === "number" ? p.x : i));
  const sx = scale(xs, PAD, CHART_WIDTH - PAD);
  const sy = scale(
    points.map((p) => p.y),
    CHART_HEIGHT - PAD,
    PAD, // larger y is higher on screen
  );
  if (chart.kind === "line") {
    const line = doc.createElementNS(SVG_NS, "polyline");
    line.setAttribute(
      "points",
      points.map((p, i) => `${sx(xs[i]!)},${sy(p.y)}`).join(" "),
    );
    line.setAttribute("class", "chart-path");
    svg.appendChild(line);
  }
  points.forEach((p, i) => {
    const dot = doc.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(sx(xs[i]!)));
    dot.setAttribute("cy", String(sy(p.y)));
    dot.setAttribute("r", "5");
    dot.dataset.addr = String(p.addr);
    svg.appendChild(dot);
  });
  return svg;
}

function renderBars(doc: Document, bars: BarView[]): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${CHART_WIDTH} ${CHART_HEIGHT}`);
  svg.setAttribute("class", "chart chart-bar");
  const sy = scale(
    [0, ...bars.map((b) => b.y)],
    CHART_HEIGHT - PAD,
    PAD,
  );
  const slot = (CHART_WIDTH - 2 * PAD) / Math.max(bars.length, 1);
  bars.forEach((b, i) => {
    const rect = doc.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(PAD + i * slot + slot * 0.15));
    rect.setAttribute("width", String(slot * 0.7));
    rect.setAttribute("y", String(sy(b.y)));
    rect.setAttribute("height", String(sy(0) - sy(b.y)));
    rect.dataset.addr = String(b.addr);
    svg.appendChild(rect);
  });
  return svg;
}

/** Anything we don't know how to draw still has to be inspectable:
 * a raw table of the chart's data points. */
function renderFallbackTable(doc: Document, chart: ChartView): HTMLElement {
  const wrap = el(doc, "figure", "chart-fallback");
  const note = el(doc, "p");
  note.textContent = `unsupported chart kind "${chart.kind}" — raw data`;
  wrap.appendChild(note);
  const t = el(doc, "table");
  const body = el(doc, "tbody");
  for (const p of chart.points ?? []) {
    const tr = el(doc, "tr");
    const label = el(doc, "td");
    label.textContent = "x" in p ? String(p.x) : String((p as BarView).label);
    const value = el(doc, "td");
    value.dataset.addr = String(p.addr);
    value.textContent = String(p.y);
    tr.appendChild(label);
    tr.appendChild(value);
    body.appendChild(tr);
  }
  t.appendChild(body);
  wrap.appendChild(t);
  return wrap;
}

function renderChart(doc: Document, chart: ChartView): HTMLElement {
  const wrap = el(doc, "figure", "chart-view");
  wrap.dataset.name = chart.name;
  if (chart.kind === "line" || chart.kind === "scatter") {
    wrap.appendChild(renderPoints(doc, chart, (chart.points ?? []) as PointView[]));
  } else if (chart.kind === "bar") {
    wrap.appendChild(renderBars(doc, (chart.points ?? []) as BarView[]));
  } else if (chart.kind === "value") {
    const pre = el(doc, "pre", "value-view");
    pre.textContent = chart.text ?? "";
    wrap.appendChild(pre);
  } else {
    wrap.appendChild(renderFallbackTable(doc, chart));
  }
  if (chart.caption) {
    const cap = el(doc, "figcaption");
    cap.textContent = chart.caption;
    wrap.appendChild(cap);
  }
  return wrap;
}

/** Build the whole view. The caller owns the container. */
export function render(container: HTMLElement, view: View): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  if (view.tables.length === 0 && view.charts.length === 0) {
    const empty = el(doc, "p", "empty-view");
    empty.textContent = "nothing to show — the session produced no view";
    container.appendChild(empty);
    return;
  }
  const tables = el(doc, "section", "tables");
  for (const table of view.tables) tables.appendChild(renderTable(doc, table));
  const charts = el(doc, "section", "charts");
  for (const chart of view.charts) charts.appendChild(renderChart(doc, chart));
  container.appendChild(tables);
  container.appendChild(charts);
}
