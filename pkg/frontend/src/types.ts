// Wire types for the seqbox HTTP API. The layout document is the canonical,
// server-computed geometry; the client renders it verbatim and never
// recomputes statistics.

export const SUPPORTED_SCHEMA_VERSION = 1;

export type LodPreset =
  | "point"
  | "interval-no-outliers"
  | "interval-with-outliers"
  | "detailed-quartiles"
  | "plain-quartiles"
  | "uncolored";

export type ColorMode = "time-scale" | "uniform-alpha";

// Click-through order when cycling a box's level of detail.
export const LOD_CYCLE: readonly LodPreset[] = [
  "detailed-quartiles",
  "plain-quartiles",
  "interval-with-outliers",
  "interval-no-outliers",
  "uncolored",
  "point",
];

// Mirror of the engine's fixed preset-to-flags bijection, used only to give
// instant feedback when cycling a box locally; the server remains the
// authority and the next fetched document carries the same flags.
export const LOD_FLAGS: Record<
  LodPreset,
  { collapsed: boolean; showOutliers: boolean; showQuartilePoints: boolean; colorMode: ColorMode }
> = {
  point: { collapsed: true, showOutliers: false, showQuartilePoints: false, colorMode: "time-scale" },
  "interval-no-outliers": { collapsed: false, showOutliers: false, showQuartilePoints: true, colorMode: "time-scale" },
  "interval-with-outliers": { collapsed: false, showOutliers: true, showQuartilePoints: false, colorMode: "time-scale" },
  "detailed-quartiles": { collapsed: false, showOutliers: true, showQuartilePoints: true, colorMode: "time-scale" },
  "plain-quartiles": { collapsed: false, showOutliers: false, showQuartilePoints: false, colorMode: "time-scale" },
  uncolored: { collapsed: false, showOutliers: true, showQuartilePoints: true, colorMode: "uniform-alpha" },
};

export interface PointDoc {
  x: number;
  y: number;
  duration: number;
  occurrence: string;
  axis_pos: number;
  color_key: number | null;
  is_outlier: boolean;
  member: string;
}

export interface BoxDoc {
  column: number;
  x: number;
  width: number;
  event_type: string;
  count: number;
  q: [number, number, number, number, number];
  fence: [number, number];
  lod: LodPreset;
  collapsed: boolean;
  show_outlier_points: boolean;
  show_quartile_points: boolean;
  color_mode: ColorMode;
  points: PointDoc[];
}

export interface RowDoc {
  row: number;
  signature: string[];
  frequency: number;
  breakdown: string | null;
  y: number;
  height: number;
  boxes: BoxDoc[];
}

export interface ColumnDoc {
  index: number;
  x: number;
  width: number;
  anchor: string | null;
}

export interface AxisDoc {
  kind: string;
  t0: number | string;
  tN: number | string;
}

export interface OverviewDocument {
  schema_version: number;
  rows: RowDoc[];
  columns: ColumnDoc[];
  axis: AxisDoc;
  color_legend: string[];
  totals: Record<string, unknown>;
}

export interface DatasetSummary {
  dataset_id: string;
  n_event_types: number;
  n_sequences: number;
  n_unique_sequences: number;
  time_extent: [string, string];
}

export interface FilterState {
  date_from: string | null;
  date_to: string | null;
  days_of_week: number[] | null;
}

export interface SessionState {
  session_id: string;
  dataset_id: string;
  anchors: string[];
  filter: FilterState;
  axis_scale: { kind: string; t0?: number; tN?: number };
  color_scale: { kind: string } | null;
  stats: { k: number };
  coverage: { threshold: number; min_frequency: number };
  lods: {
    default: LodPreset;
    cells: [number, number, LodPreset][];
    event_types: Record<string, LodPreset>;
  };
  breakdowns: string[][];
}

export type SessionPatch = Partial<
  Pick<
    SessionState,
    "anchors" | "filter" | "axis_scale" | "color_scale" | "stats" | "coverage" | "lods" | "breakdowns"
  >
>;

export interface EventBoxDetailPoint {
  member: string;
  duration: number;
  occurrence: string;
  axis_pos: number;
  color_key: number | null;
  is_outlier: boolean;
}

export interface EventBoxDetail {
  row: number;
  column: number;
  event_type: string;
  count: number;
  q: number[];
  fence: [number, number];
  points: EventBoxDetailPoint[];
}
