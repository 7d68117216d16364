/** Shapes of the JSON the session service hands out. */

export interface CellView {
  addr: number;
  value: number | string;
}

export interface TableView {
  kind: "table";
  name: string;
  columns: string[];
  rows: CellView[][];
  row_addrs: number[];
}

export interface PointView {
  x: number | string;
  y: number;
  addr: number;
}

export interface BarView {
  label: string;
  y: number;
  addr: number;
}

/** Charts carry `points` (line/scatter/bar data) or `text` (plain value). */
export interface ChartView {
  kind: string;
  name: string;
  points?: (PointView | BarView)[];
  caption?: string;
  text?: string;
}

export interface View {
  tables: TableView[];
  charts: ChartView[];
}

export interface InputEntry {
  path: string;
  addr: number;
  kind: "cell" | "node";
}

export interface SessionInfo {
  id: string;
  view: View;
  inputs: InputEntry[];
}

export type QueryOp =
  | "demands"
  | "demandedBy"
  | "suffices"
  | "dualPreimage"
  | "linkedInputs"
  | "linkedOutputs";

export type Restrict = "inputs" | "outputs" | "none";

/** The service contract; the real HTTP client and the test mock share it. */
export interface Service {
  createSession(
    source: string,
    datasets: Record<string, unknown>,
  ): Promise<SessionInfo>;
  query(
    sessionId: string,
    op: QueryOp,
    selection: number[],
    restrict: Restrict,
  ): Promise<number[]>;
}
