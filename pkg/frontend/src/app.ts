// Explorer: dispatches user interactions to the service and re-renders.
//
// Every user action maps to exactly one service request. Actions that change
// server-computed geometry (anchors, filters, scales, breakdowns, coverage)
// mark the view stale; a single shared render fetch refreshes the document
// once the action queue drains, so rapid actions coalesce into one refresh.
// Cycling a box's level of detail patches the session and applies the same
// preset flags locally for instant, box-local feedback; statistics and
// geometry always come from the server. All composable state (current
// anchors, per-box presets, breakdowns) is recovered from the last document,
// which keeps the explorer stateless across reloads given the session id.

import type { ApiClient } from "./api.js";
import { renderScene, type Scene } from "./scene.js";
import type {
  EventBoxDetail,
  FilterState,
  LodPreset,
  OverviewDocument,
  SessionPatch,
} from "./types.js";
import { LOD_CYCLE, LOD_FLAGS } from "./types.js";

export type Action =
  | { type: "select-anchor"; eventType: string }
  | { type: "clear-anchors" }
  | { type: "set-filter"; filter: FilterState }
  | { type: "set-axis"; kind: string }
  | { type: "set-color"; kind: string | null }
  | { type: "set-coverage"; threshold: number; minFrequency: number }
  | { type: "cycle-lod"; row: number; column: number }
  | { type: "breakdown-row"; signature: string[] }
  | { type: "inspect-box"; row: number; column: number };

export interface ExplorerHandlers {
  onScene?(scene: Scene, doc: OverviewDocument): void;
  onDetail?(detail: EventBoxDetail): void;
  onError?(error: unknown): void;
}

export function anchorsOf(doc: OverviewDocument): string[] {
  return doc.columns
    .filter((column) => column.anchor !== null)
    .sort((a, b) => a.index - b.index)
    .map((column) => column.anchor as string);
}

export function lodCellsOf(doc: OverviewDocument): [number, number, LodPreset][] {
  const cells: [number, number, LodPreset][] = [];
  for (const row of doc.rows) {
    for (const box of row.boxes) {
      cells.push([row.row, box.column, box.lod]);
    }
  }
  return cells;
}

export function breakdownsOf(doc: OverviewDocument): string[][] {
  const seen = new Set<string>();
  const signatures: string[][] = [];
  for (const row of doc.rows) {
    if (row.breakdown !== null) {
      const key = JSON.stringify(row.signature);
      if (!seen.has(key)) {
        seen.add(key);
        signatures.push(row.signature);
      }
    }
  }
  return signatures;
}

interface QueuedRequest {
  run(): Promise<void>;
  invalidatesDoc: boolean;
}

export class Explorer {
  private doc: OverviewDocument | null = null;
  private queue: QueuedRequest[] = [];
  private active: Promise<void> | null = null;
  private stale = false;

  constructor(
    private readonly api: ApiClient,
    readonly sessionId: string,
    private readonly handlers: ExplorerHandlers = {},
  ) {}

  get document(): OverviewDocument | null {
    return this.doc;
  }

  /** Initial render fetch; also used after doc-invalidating actions. */
  async load(): Promise<void> {
    this.enqueue({
      invalidatesDoc: false,
      run: async () => {
        const doc = await this.api.getOverview(this.sessionId);
        this.acceptDocument(doc);
      },
    });
    await this.settle();
  }

  /**
   * Dispatch one user action. Exactly one service request is issued per
   * action; doc-invalidating actions trigger one shared render fetch after
   * the queue drains.
   */
  dispatch(action: Action): void {
    const doc = this.doc;
    switch (action.type) {
      case "select-anchor": {
        const anchors = doc ? anchorsOf(doc) : [];
        if (!anchors.includes(action.eventType)) {
          anchors.push(action.eventType);
        }
        this.enqueuePatch({ anchors });
        break;
      }
      case "clear-anchors":
        this.enqueuePatch({ anchors: [] });
        break;
      case "set-filter":
        this.enqueuePatch({ filter: action.filter });
        break;
      case "set-axis":
        this.enqueuePatch({ axis_scale: { kind: action.kind } });
        break;
      case "set-color":
        this.enqueuePatch({
          color_scale: action.kind === null ? null : { kind: action.kind },
        });
        break;
      case "set-coverage":
        this.enqueuePatch({
          coverage: { threshold: action.threshold, min_frequency: action.minFrequency },
        });
        break;
      case "breakdown-row": {
        const breakdowns = doc ? breakdownsOf(doc) : [];
        const key = JSON.stringify(action.signature);
        if (!breakdowns.some((signature) => JSON.stringify(signature) === key)) {
          breakdowns.push(action.signature);
        }
        this.enqueuePatch({ breakdowns });
        break;
      }
      case "cycle-lod":
        this.cycleLod(action.row, action.column);
        break;
      case "inspect-box":
        this.enqueue({
          invalidatesDoc: false,
          run: async () => {
            const detail = await this.api.eventBoxDetail(
              this.sessionId,
              action.row,
              action.column,
            );
            this.handlers.onDetail?.(detail);
          },
        });
        break;
    }
  }

  /** Resolves when the queue is empty and any pending refresh has landed. */
  async settle(): Promise<void> {
    while (this.active || this.queue.length > 0 || this.stale) {
      await (this.active ?? this.pump());
    }
  }

  private cycleLod(row: number, column: number): void {
    const doc = this.doc;
    if (!doc) return;
    const targetRow = doc.rows.find((r) => r.row === row);
    const targetBox = targetRow?.boxes.find((b) => b.column === column);
    if (!targetRow || !targetBox) return;
    const next =
      LOD_CYCLE[(LOD_CYCLE.indexOf(targetBox.lod) + 1) % LOD_CYCLE.length];

    const cells = lodCellsOf(doc).map(([r, c, preset]): [number, number, LodPreset] =>
      r === row && c === column ? [r, c, next] : [r, c, preset],
    );
    this.enqueue({
      invalidatesDoc: false,
      run: async () => {
        await this.api.patchSession(this.sessionId, {
          lods: { default: "detailed-quartiles", cells, event_types: {} },
        });
      },
    });

    // Instant box-local feedback; the server's next document carries the
    // same preset flags. Geometry (widths) stays as served.
    const flags = LOD_FLAGS[next];
    targetBox.lod = next;
    targetBox.collapsed = flags.collapsed;
    targetBox.show_outlier_points = flags.showOutliers;
    targetBox.show_quartile_points = flags.showQuartilePoints;
    targetBox.color_mode = flags.colorMode;
    this.emitScene();
  }

  private enqueuePatch(patch: SessionPatch): void {
    this.enqueue({
      invalidatesDoc: true,
      run: async () => {
        await this.api.patchSession(this.sessionId, patch);
      },
    });
  }

  private enqueue(request: QueuedRequest): void {
    this.queue.push(request);
    void this.pump();
  }

  // Single-flight executor: one request in flight per session; when the
  // queue drains, one shared render fetch refreshes the view after any
  // number of doc-invalidating actions.
  private pump(): Promise<void> {
    if (!this.active) {
      this.active = this.drain().finally(() => {
        this.active = null;
      });
    }
    return this.active;
  }

  private async drain(): Promise<void> {
    while (this.queue.length > 0 || this.stale) {
      const request = this.queue.shift();
      if (request) {
        try {
          await request.run();
          if (request.invalidatesDoc) {
            this.stale = true;
          }
        } catch (error) {
          this.handlers.onError?.(error);
        }
        continue;
      }
      this.stale = false;
      try {
        this.acceptDocument(await this.api.getOverview(this.sessionId));
      } catch (error) {
        this.handlers.onError?.(error);
      }
    }
  }

  private acceptDocument(doc: OverviewDocument): void {
    this.doc = doc;
    this.emitScene();
  }

  private emitScene(): void {
    if (!this.doc) return;
    try {
      this.handlers.onScene?.(renderScene(this.doc), this.doc);
    } catch (error) {
      this.handlers.onError?.(error);
    }
  }
}
