/** SVG scatter of the current Pareto front with the gray baseline overlay.
 * Pure string rendering: testable without a DOM. */

import {
  axisLabel,
  placePoints,
  type BaselineSample,
  type Viewport,
} from "../projection.js";
import type { ObjectiveName, ParetoPoint } from "../types.js";

export const DEFAULT_VIEWPORT: Viewport = { width: 640, height: 420, margin: 48 };

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderParetoSvg(
  points: ParetoPoint[],
  baseline: BaselineSample[],
  x: ObjectiveName,
  y: ObjectiveName,
  viewport: Viewport = DEFAULT_VIEWPORT,
): string {
  const { width, height, margin } = viewport;
  const placed = placePoints(points, baseline, x, y, viewport);
  const parts: string[] = [];
  parts.push(
    `<svg class="pareto" viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`,
  );
  parts.push(
    `<line class="axis" x1="${margin}" y1="${height - margin}" x2="${width - margin}" y2="${height - margin}"/>`,
    `<line class="axis" x1="${margin}" y1="${margin}" x2="${margin}" y2="${height - margin}"/>`,
    `<text class="axis-label x" x="${width / 2}" y="${height - 8}">${esc(axisLabel(x))}</text>`,
    `<text class="axis-label y" x="12" y="${height / 2}" transform="rotate(-90 12 ${height / 2})">${esc(axisLabel(y))}</text>`,
  );
  for (const b of placed.overlay) {
    parts.push(
      `<circle class="baseline" data-share="${b.share}" cx="${b.px.toFixed(1)}" cy="${b.py.toFixed(1)}" r="3"><title>baseline share ${b.share}</title></circle>`,
    );
  }
  for (const p of placed.points) {
    parts.push(
      `<circle class="front" data-ruleset="${esc(p.ruleset_id)}" cx="${p.px.toFixed(1)}" cy="${p.py.toFixed(1)}" r="5">` +
        `<title>${esc(p.ruleset_id)}: ${x}=${p.x}, ${y}=${p.y}</title></circle>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n");
}

export function renderAxisSelectors(
  current: { x: ObjectiveName; y: ObjectiveName },
  objectives: ObjectiveName[],
): string {
  const options = (selected: ObjectiveName) =>
    objectives
      .map(
        (o) =>
          `<option value="${o}"${o === selected ? " selected" : ""}>${o}</option>`,
      )
      .join("");
  return (
    `<label>x <select id="axis-x">${options(current.x)}</select></label>\n` +
    `<label>y <select id="axis-y">${options(current.y)}</select></label>`
  );
}
