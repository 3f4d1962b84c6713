// Pure renderer: layout document in, flat scene graph out. The scene is a
// deterministic function of the document, so rendering differences always
// trace back to document differences. DOM mounting lives in dom.ts.

import type { BoxDoc, OverviewDocument, RowDoc } from "./types.js";
import { SUPPORTED_SCHEMA_VERSION } from "./types.js";

export class SchemaVersionError extends Error {
  constructor(public received: number) {
    super(
      `layout document schema_version ${received} is not supported ` +
        `(expected ${SUPPORTED_SCHEMA_VERSION})`,
    );
    this.name = "SchemaVersionError";
  }
}

// Okabe-Ito colorblind-safe categorical palette; color keys cycle through it.
// Day-of-week uses entries 0..6, month-of-year wraps after 8.
export const CATEGORICAL_PALETTE: readonly string[] = [
  "#E69F00",
  "#56B4E9",
  "#009E73",
  "#F0E442",
  "#0072B2",
  "#D55E00",
  "#CC79A7",
  "#999999",
];

export const QUARTILE_FILLS: readonly string[] = [
  "#c6dbef",
  "#6baed6",
  "#2171b5",
  "#08306b",
];

const MARGIN_LEFT = 70;
const MARGIN_TOP = 60;
const AXIS_OFFSET = 12;

export interface SceneRect {
  kind: "quartile" | "box-outline" | "collapsed" | "legend-swatch" | "anchor-band";
  id: string;
  x: number;
  y: number;
  width: number;
  height: number;
  fill: string;
  row?: number;
  column?: number;
}

export interface SceneCircle {
  id: string;
  cx: number;
  cy: number;
  r: number;
  fill: string;
  fillOpacity: number;
  outlier: boolean;
  row: number;
  column: number;
  member: string;
}

export interface SceneText {
  id: string;
  x: number;
  y: number;
  text: string;
}

export interface SceneLine {
  id: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface Scene {
  width: number;
  height: number;
  rects: SceneRect[];
  circles: SceneCircle[];
  texts: SceneText[];
  lines: SceneLine[];
}

function sceneExtent(doc: OverviewDocument): { width: number; height: number } {
  const lastColumn = doc.columns[doc.columns.length - 1];
  const lastRow = doc.rows[doc.rows.length - 1];
  return {
    width: lastColumn ? lastColumn.x + lastColumn.width + 20 : MARGIN_LEFT + 20,
    height: lastRow ? lastRow.y + lastRow.height + 20 : MARGIN_TOP + 20,
  };
}

function pushBox(scene: Scene, row: RowDoc, box: BoxDoc): void {
  const base = `r${row.row}-c${box.column}`;
  if (box.collapsed) {
    scene.rects.push({
      kind: "collapsed",
      id: `box-${base}`,
      x: box.x,
      y: row.y + row.height / 2 - 2,
      width: box.width,
      height: 4,
      fill: "#888888",
      row: row.row,
      column: box.column,
    });
    return;
  }
  const spread = box.q[4] - box.q[0];
  for (let segment = 0; segment < 4; segment += 1) {
    const left = spread === 0 ? 0 : (box.q[segment] - box.q[0]) / spread;
    const right = spread === 0 ? 0 : (box.q[segment + 1] - box.q[0]) / spread;
    scene.rects.push({
      kind: "quartile",
      id: `qbox-${base}-${segment}`,
      x: box.x + left * box.width,
      y: row.y,
      width: (right - left) * box.width,
      height: row.height,
      fill: QUARTILE_FILLS[segment],
      row: row.row,
      column: box.column,
    });
  }
  scene.rects.push({
    kind: "box-outline",
    id: `box-${base}`,
    x: box.x,
    y: row.y,
    width: box.width,
    height: row.height,
    fill: "none",
    row: row.row,
    column: box.column,
  });
  for (const point of box.points) {
    if (point.is_outlier && !box.show_outlier_points) continue;
    if (!point.is_outlier && !box.show_quartile_points) continue;
    const key = point.color_key;
    const alpha = box.color_mode === "uniform-alpha" || key === null;
    scene.circles.push({
      id: `pt-${base}-${point.member}`,
      cx: point.x,
      cy: point.y,
      r: 1.6,
      fill:
        key === null || alpha
          ? "#333333"
          : CATEGORICAL_PALETTE[key % CATEGORICAL_PALETTE.length],
      fillOpacity: alpha ? 0.25 : 1,
      outlier: point.is_outlier,
      row: row.row,
      column: box.column,
      member: point.member,
    });
  }
}

export function renderScene(doc: OverviewDocument): Scene {
  if (doc.schema_version !== SUPPORTED_SCHEMA_VERSION) {
    throw new SchemaVersionError(doc.schema_version);
  }
  const { width, height } = sceneExtent(doc);
  const scene: Scene = { width, height, rects: [], circles: [], texts: [], lines: [] };

  const axisX = MARGIN_LEFT - AXIS_OFFSET;
  const axisBottom = Math.max(height - 20, MARGIN_TOP + 1);
  scene.lines.push({ id: "axis", x1: axisX, y1: MARGIN_TOP, x2: axisX, y2: axisBottom });
  scene.texts.push({ id: "axis-kind", x: 4, y: MARGIN_TOP - 4, text: doc.axis.kind });
  scene.texts.push({ id: "axis-t0", x: 4, y: MARGIN_TOP + 8, text: String(doc.axis.t0) });
  scene.texts.push({ id: "axis-tN", x: 4, y: axisBottom, text: String(doc.axis.tN) });

  doc.color_legend.forEach((label, index) => {
    scene.rects.push({
      kind: "legend-swatch",
      id: `legend-${index}`,
      x: MARGIN_LEFT + index * 46,
      y: 8,
      width: 8,
      height: 8,
      fill: CATEGORICAL_PALETTE[index % CATEGORICAL_PALETTE.length],
    });
    scene.texts.push({
      id: `legend-label-${index}`,
      x: MARGIN_LEFT + index * 46 + 10,
      y: 15,
      text: label,
    });
  });

  for (const column of doc.columns) {
    if (column.anchor !== null) {
      scene.rects.push({
        kind: "anchor-band",
        id: `anchor-band-${column.index}`,
        x: column.x - 2,
        y: MARGIN_TOP - 6,
        width: column.width + 4,
        height: Math.max(height - MARGIN_TOP - 8, 1),
        fill: "#f3ede2",
        column: column.index,
      });
    }
  }

  for (const row of doc.rows) {
    scene.texts.push({
      id: `row-label-${row.row}`,
      x: 4,
      y: row.y + row.height / 2 + 3,
      text: row.breakdown
        ? `${row.frequency}x [${row.breakdown}]`
        : `${row.frequency}x`,
    });
    for (const box of row.boxes) {
      pushBox(scene, row, box);
    }
  }
  return scene;
}
