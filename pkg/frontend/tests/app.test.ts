import { readFileSync } from "node:fs";
import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { Explorer, anchorsOf, breakdownsOf, lodCellsOf } from "../src/app.js";
import type { Scene } from "../src/scene.js";
import type { OverviewDocument } from "../src/types.js";
import { LOD_CYCLE } from "../src/types.js";

const golden: OverviewDocument = JSON.parse(
  readFileSync(new URL("./golden/overview.json", import.meta.url), "utf-8"),
);

interface Call {
  method: string;
  path: string;
  body?: unknown;
}

class FakeService {
  calls: Call[] = [];
  failNextPatch: { status: number; body: unknown } | null = null;

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const call: Call = { method, path: url };
    if (typeof init?.body === "string" && init.body.length > 0) {
      try {
        call.body = JSON.parse(init.body);
      } catch {
        call.body = init.body;
      }
    }
    this.calls.push(call);

    if (method === "PATCH" && this.failNextPatch) {
      const { status, body } = this.failNextPatch;
      this.failNextPatch = null;
      return new Response(JSON.stringify(body), { status });
    }
    if (method === "GET" && url.endsWith("/overview")) {
      return new Response(JSON.stringify(golden), { status: 200 });
    }
    if (method === "GET" && url.includes("/eventbox/")) {
      return new Response(
        JSON.stringify({
          row: 0,
          column: 0,
          event_type: "E",
          count: 1,
          q: [1, 1, 1, 1, 1],
          fence: [1, 1],
          points: [],
        }),
        { status: 200 },
      );
    }
    if (method === "PATCH") {
      return new Response(JSON.stringify({ session_id: "s" }), { status: 200 });
    }
    return new Response(JSON.stringify({ code: "UnknownPath", message: url }), {
      status: 404,
    });
  };

  byMethod(method: string): Call[] {
    return this.calls.filter((c) => c.method === method);
  }
}

describe("Explorer request discipline", () => {
  let service: FakeService;
  let explorer: Explorer;
  let scenes: Scene[];
  let errors: unknown[];
  let details: unknown[];

  beforeEach(async () => {
    service = new FakeService();
    scenes = [];
    errors = [];
    details = [];
    explorer = new Explorer(new ApiClient("", service.fetch), "sess", {
      onScene: (scene) => scenes.push(scene),
      onDetail: (detail) => details.push(detail),
      onError: (error) => errors.push(error),
    });
    await explorer.load();
    service.calls = [];
  });

  it("loads with a single overview fetch", async () => {
    const fresh = new FakeService();
    const e = new Explorer(new ApiClient("", fresh.fetch), "sess");
    await e.load();
    expect(fresh.calls).toEqual([
      { method: "GET", path: "/sessions/sess/overview" },
    ]);
  });

  it("selecting an anchor issues exactly one PATCH", async () => {
    explorer.dispatch({ type: "select-anchor", eventType: "Check-in Kiosk" });
    await explorer.settle();
    const patches = service.byMethod("PATCH");
    expect(patches).toHaveLength(1);
    const body = patches[0].body as { anchors: string[] };
    // Current anchors are recovered from the document, then extended.
    expect(body.anchors).toEqual([...anchorsOf(golden), "Check-in Kiosk"]);
  });

  it("clearing anchors issues exactly one PATCH", async () => {
    explorer.dispatch({ type: "clear-anchors" });
    await explorer.settle();
    expect(service.byMethod("PATCH")).toHaveLength(1);
    expect(service.byMethod("PATCH")[0].body).toEqual({ anchors: [] });
  });

  it("setting a filter issues exactly one PATCH", async () => {
    explorer.dispatch({
      type: "set-filter",
      filter: { date_from: null, date_to: null, days_of_week: [3] },
    });
    await explorer.settle();
    expect(service.byMethod("PATCH")).toHaveLength(1);
  });

  it("inspecting a box issues exactly one GET and opens the detail panel", async () => {
    explorer.dispatch({ type: "inspect-box", row: 0, column: 0 });
    await explorer.settle();
    expect(service.calls).toEqual([
      { method: "GET", path: "/sessions/sess/eventbox/0/0" },
    ]);
    expect(details).toHaveLength(1);
  });

  it("shares one render refresh across a burst of actions", async () => {
    explorer.dispatch({ type: "select-anchor", eventType: "Check-in Kiosk" });
    explorer.dispatch({ type: "set-axis", kind: "day-of-week" });
    explorer.dispatch({ type: "set-color", kind: null });
    await explorer.settle();
    expect(service.byMethod("PATCH")).toHaveLength(3);
    expect(service.byMethod("GET")).toHaveLength(1); // one coalesced refresh
  });

  it("cycling a level of detail issues exactly one PATCH and no refetch", async () => {
    const target = golden.rows[0].boxes[0];
    explorer.dispatch({ type: "cycle-lod", row: 0, column: target.column });
    await explorer.settle();
    expect(service.byMethod("PATCH")).toHaveLength(1);
    expect(service.byMethod("GET")).toHaveLength(0);
    const body = service.byMethod("PATCH")[0].body as {
      lods: { cells: [number, number, string][] };
    };
    // The patch carries the complete presentation state with one cell advanced.
    const next = LOD_CYCLE[(LOD_CYCLE.indexOf(target.lod) + 1) % LOD_CYCLE.length];
    const expected = lodCellsOf(golden).map(([row, column, preset]) =>
      row === 0 && column === target.column ? [row, column, next] : [row, column, preset],
    );
    expect(body.lods.cells).toEqual(expected);
  });

  it("cycling a level of detail alters only the targeted box in the scene", async () => {
    const before = scenes[scenes.length - 1] ?? null;
    expect(before).not.toBeNull();
    const target = golden.rows[0].boxes.find((b) => b.lod === "detailed-quartiles")!;
    explorer.dispatch({ type: "cycle-lod", row: 0, column: target.column });
    await explorer.settle();
    const after = scenes[scenes.length - 1];

    const isTarget = (id: string) => id.includes(`r0-c${target.column}`);
    const beforeOther = {
      rects: before!.rects.filter((r) => !isTarget(r.id)),
      circles: before!.circles.filter((c) => !isTarget(c.id)),
    };
    const afterOther = {
      rects: after.rects.filter((r) => !isTarget(r.id)),
      circles: after.circles.filter((c) => !isTarget(c.id)),
    };
    expect(afterOther).toEqual(beforeOther);
    // detailed-quartiles cycles to plain-quartiles: points disappear.
    expect(after.circles.filter((c) => isTarget(c.id))).toHaveLength(0);
    expect(before!.circles.filter((c) => isTarget(c.id)).length).toBeGreaterThan(0);
  });

  it("breaking down a row issues exactly one PATCH with the signature", async () => {
    const signature = golden.rows[0].signature;
    explorer.dispatch({ type: "breakdown-row", signature });
    await explorer.settle();
    const patches = service.byMethod("PATCH");
    expect(patches).toHaveLength(1);
    expect((patches[0].body as { breakdowns: string[][] }).breakdowns).toEqual([
      ...breakdownsOf(golden),
      signature,
    ]);
  });

  it("surfaces API errors through the error handler", async () => {
    service.failNextPatch = {
      status: 422,
      body: { code: "InvalidField", message: "bad anchor", field: "anchors" },
    };
    explorer.dispatch({ type: "select-anchor", eventType: "Nope" });
    await explorer.settle();
    expect(errors).toHaveLength(1);
    const error = errors[0] as ApiError;
    expect(error.code).toBe("InvalidField");
    expect(error.field).toBe("anchors");
  });
});
