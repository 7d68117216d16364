/** The moving-average session as the service reports it, with the
 * query answers frozen from the real backend (tests never compute
 * provenance; they replay these verbatim). */

import type { InputEntry, SessionInfo, View } from "../src/types.js";

export const MAVG_VIEW: View = {
  tables: [
    {
      kind: "table",
      name: "data",
      columns: ["emissions"],
      rows: [
        [{ addr: 0, value: 18.17 }],
        [{ addr: 2, value: 22.13 }],
        [{ addr: 4, value: 37.14 }],
        [{ addr: 6, value: 61.27 }],
      ],
      row_addrs: [1, 3, 5, 7],
    },
  ],
  charts: [
    {
      kind: "line",
      name: "out",
      points: [
        { x: 0, y: 20.15, addr: 52 },
        { x: 1, y: 25.813333333333333, addr: 58 },
        { x: 2, y: 40.18, addr: 64 },
      ],
    },
  ],
};

export const MAVG_INPUTS: InputEntry[] = [
  { path: "data[0:]", addr: 12, kind: "node" },
  { path: "data[0]", addr: 1, kind: "node" },
  { path: "data[0].emissions", addr: 0, kind: "cell" },
  { path: "data[1:]", addr: 11, kind: "node" },
  { path: "data[1]", addr: 3, kind: "node" },
  { path: "data[1].emissions", addr: 2, kind: "cell" },
  { path: "data[2:]", addr: 10, kind: "node" },
  { path: "data[2]", addr: 5, kind: "node" },
  { path: "data[2].emissions", addr: 4, kind: "cell" },
  { path: "data[3:]", addr: 9, kind: "node" },
  { path: "data[3]", addr: 7, kind: "node" },
  { path: "data[3].emissions", addr: 6, kind: "cell" },
  { path: "data[4:]", addr: 8, kind: "node" },
];

export const MAVG_SESSION: SessionInfo = {
  id: "fixture",
  view: MAVG_VIEW,
  inputs: MAVG_INPUTS,
};

/** op|selection|restrict → answer, as the real service returns them. */
export const MAVG_ANSWERS: Record<string, number[]> = {
  "demandedBy|0|outputs": [52, 58],
  "demandedBy|2|outputs": [52, 58, 64],
  "demandedBy|4|outputs": [58, 64],
  "demandedBy|6|outputs": [64],
  "linkedInputs|0|inputs": [0, 2, 4],
  "linkedInputs|2|inputs": [0, 2, 4, 6],
  "linkedInputs|4|inputs": [0, 2, 4, 6],
  "linkedInputs|6|inputs": [2, 4, 6],
  "demands|52|inputs": [0, 2],
  "demands|58|inputs": [0, 2, 4],
  "demands|64|inputs": [2, 4, 6],
  "linkedOutputs|52|outputs": [52, 58, 64],
  "linkedOutputs|58|outputs": [52, 58, 64],
  "linkedOutputs|64|outputs": [52, 58, 64],
  "demands|52,58,64|inputs": [0, 2, 4, 6],
};
