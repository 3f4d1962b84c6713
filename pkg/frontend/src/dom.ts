// SVG DOM mounting for a scene graph. Kept apart from scene.ts so the
// renderer itself stays testable without a browser.

import type { Scene } from "./scene.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el(
  name: string,
  attrs: Record<string, string | number>,
  text?: string,
): SVGElement {
  const node = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node as SVGElement;
}

export interface MountCallbacks {
  onBoxClick?(row: number, column: number, alt: boolean): void;
}

export function mountScene(
  scene: Scene,
  svg: SVGSVGElement,
  callbacks: MountCallbacks = {},
): void {
  svg.replaceChildren();
  svg.setAttribute("width", String(scene.width));
  svg.setAttribute("height", String(scene.height));
  svg.setAttribute("viewBox", `0 0 ${scene.width} ${scene.height}`);

  for (const line of scene.lines) {
    svg.appendChild(
      el("line", {
        id: line.id,
        x1: line.x1,
        y1: line.y1,
        x2: line.x2,
        y2: line.y2,
        stroke: "#333",
        "stroke-width": 1,
      }),
    );
  }
  for (const rect of scene.rects) {
    const node = el("rect", {
      id: rect.id,
      x: rect.x,
      y: rect.y,
      width: rect.width,
      height: rect.height,
      fill: rect.fill,
      "data-kind": rect.kind,
    });
    if (rect.kind === "box-outline") {
      node.setAttribute("stroke", "#444");
      node.setAttribute("stroke-width", "0.5");
    }
    if (rect.row !== undefined && rect.column !== undefined) {
      const { row, column } = rect;
      node.addEventListener("click", (event) =>
        callbacks.onBoxClick?.(row, column, (event as MouseEvent).altKey),
      );
      node.setAttribute("cursor", "pointer");
    }
    svg.appendChild(node);
  }
  for (const circle of scene.circles) {
    const node = el("circle", {
      id: circle.id,
      cx: circle.cx,
      cy: circle.cy,
      r: circle.r,
      fill: circle.fill,
      "fill-opacity": circle.fillOpacity,
    });
    if (circle.outlier) {
      node.setAttribute("stroke", "#000");
      node.setAttribute("stroke-width", "0.4");
    }
    svg.appendChild(node);
  }
  for (const text of scene.texts) {
    svg.appendChild(
      el(
        "text",
        {
          id: text.id,
          x: text.x,
          y: text.y,
          "font-family": "sans-serif",
          "font-size": 9,
          fill: "#333",
        },
        text.text,
      ),
    );
  }
}
