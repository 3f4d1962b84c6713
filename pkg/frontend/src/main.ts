// Browser bootstrap: wires the toolbar, overview canvas, and detail panel to
// an Explorer. The page is stateless: reloading with ?session=... restores
// the exact view the server holds.

import { ApiClient, ApiError } from "./api.js";
import { Explorer } from "./app.js";
import { mountScene } from "./dom.js";
import { SchemaVersionError } from "./scene.js";
import type { EventBoxDetail, OverviewDocument } from "./types.js";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function showBanner(message: string): void {
  const banner = byId<HTMLDivElement>("banner");
  banner.textContent = message;
  banner.hidden = false;
}

function renderDetail(detail: EventBoxDetail): void {
  const panel = byId<HTMLElement>("detail");
  const outliers = detail.points.filter((p) => p.is_outlier);
  const rows = detail.points
    .slice()
    .sort((a, b) => Number(b.is_outlier) - Number(a.is_outlier) || b.duration - a.duration)
    .map(
      (p) =>
        `<tr class="${p.is_outlier ? "outlier" : ""}"><td>${p.member}</td>` +
        `<td>${p.duration.toFixed(1)}s</td><td>${p.occurrence}</td>` +
        `<td>${p.is_outlier ? "outlier" : ""}</td></tr>`,
    )
    .join("");
  panel.innerHTML =
    `<h3>${detail.event_type}</h3>` +
    `<p>${detail.count} occurrences, ${outliers.length} duration outliers. ` +
    `Fence [${detail.fence[0].toFixed(1)}, ${detail.fence[1].toFixed(1)}]s.</p>` +
    `<table><thead><tr><th>member</th><th>duration</th><th>occurrence</th><th></th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`;
  panel.hidden = false;
}

function describeError(error: unknown): string {
  if (error instanceof SchemaVersionError) {
    return error.message;
  }
  if (error instanceof ApiError) {
    return `${error.code}: ${error.message}`;
  }
  return String(error);
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const sessionId = params.get("session");

  if (!sessionId) {
    byId<HTMLElement>("upload").hidden = false;
    byId<HTMLButtonElement>("upload-button").addEventListener("click", async () => {
      const input = byId<HTMLInputElement>("upload-file");
      const file = input.files?.[0];
      if (!file) return;
      try {
        const summary = await api.createDataset(await file.text());
        const session = await api.createSession(summary.dataset_id);
        params.set("session", session.session_id);
        window.location.search = params.toString();
      } catch (error) {
        showBanner(describeError(error));
      }
    });
    return;
  }

  const svg = byId<HTMLElement>("overview") as unknown as SVGSVGElement;
  const explorer = new Explorer(api, sessionId, {
    onScene: (scene, doc) => {
      mountScene(scene, svg, {
        onBoxClick: (row, column, alt) =>
          explorer.dispatch(
            alt ? { type: "cycle-lod", row, column } : { type: "inspect-box", row, column },
          ),
      });
      renderToolbarState(doc);
    },
    onDetail: renderDetail,
    onError: (error) => showBanner(describeError(error)),
  });

  function renderToolbarState(doc: OverviewDocument): void {
    const totals = doc.totals as Record<string, number>;
    byId<HTMLElement>("totals").textContent =
      `${totals.n_sequences} sequences | ${totals.n_unique_sequences} unique | ` +
      `${totals.n_selected} shown`;
    const select = byId<HTMLSelectElement>("anchor-choice");
    const types = new Set<string>();
    for (const row of doc.rows) for (const t of row.signature) types.add(t);
    select.replaceChildren(
      ...[...types].sort().map((t) => new Option(t, t)),
    );
  }

  byId<HTMLButtonElement>("add-anchor").addEventListener("click", () =>
    explorer.dispatch({
      type: "select-anchor",
      eventType: byId<HTMLSelectElement>("anchor-choice").value,
    }),
  );
  byId<HTMLButtonElement>("clear-anchors").addEventListener("click", () =>
    explorer.dispatch({ type: "clear-anchors" }),
  );
  byId<HTMLSelectElement>("axis-choice").addEventListener("change", (event) =>
    explorer.dispatch({ type: "set-axis", kind: (event.target as HTMLSelectElement).value }),
  );
  byId<HTMLSelectElement>("color-choice").addEventListener("change", (event) => {
    const value = (event.target as HTMLSelectElement).value;
    explorer.dispatch({ type: "set-color", kind: value === "none" ? null : value });
  });
  byId<HTMLButtonElement>("apply-filter").addEventListener("click", () => {
    const days = [...document.querySelectorAll<HTMLInputElement>(".day-toggle:checked")]
      .map((node) => Number(node.value));
    explorer.dispatch({
      type: "set-filter",
      filter: {
        date_from: byId<HTMLInputElement>("date-from").value || null,
        date_to: byId<HTMLInputElement>("date-to").value || null,
        days_of_week: days.length > 0 ? days : null,
      },
    });
  });

  await explorer.load();
}

void start();
