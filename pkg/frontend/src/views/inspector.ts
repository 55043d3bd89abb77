/** Ruleset inspector: canonical text, per-rule attribution, and per-rule
 * REJECT / PIN feedback buttons. */

import type { ApiClient } from "../api.js";
import type { ObjectiveVector, RulesetDetail } from "../types.js";

export interface RuleAttribution {
  ruleText: string;
  savedRecords: number;
  missedRemarks: number;
}

/** Split a canonical ruleset text into its inclusion-rule lines. */
export function ruleLines(text: string): string[] {
  const out: string[] = [];
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line || line === "skip when one of") continue;
    if (line === "unless one of") break;
    out.push(line.startsWith("or ") ? line.slice(3) : line);
  }
  return out;
}

/** Score each rule alone: what it saves and what it would miss by itself. */
export async function attributeRules(
  api: ApiClient,
  sessionId: string,
  detail: RulesetDetail,
): Promise<RuleAttribution[]> {
  const out: RuleAttribution[] = [];
  for (const rule of ruleLines(detail.text)) {
    const single = `skip when one of\n  ${rule}\n`;
    const result = await api.evaluate(sessionId, single);
    out.push({
      ruleText: rule,
      savedRecords: result.objectives.saved_record_count,
      missedRemarks: result.objectives.missed_remark_count,
    });
  }
  return out;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function objectiveRows(objectives: ObjectiveVector): string {
  return Object.entries(objectives)
    .map(([name, value]) => `<tr><td>${name}</td><td>${value}</td></tr>`)
    .join("");
}

export function renderInspector(
  detail: RulesetDetail,
  attribution: RuleAttribution[],
): string {
  const breakEven = detail.break_even;
  const rows = attribution
    .map(
      (a, i) =>
        `<tr data-rule-index="${i}">` +
        `<td><code>${esc(a.ruleText)}</code></td>` +
        `<td>${a.savedRecords}</td><td>${a.missedRemarks}</td>` +
        `<td><button class="reject" data-rule="${esc(a.ruleText)}">reject</button>` +
        `<button class="pin" data-rule="${esc(a.ruleText)}">pin</button></td></tr>`,
    )
    .join("\n");
  return `
<section class="inspector" data-ruleset="${esc(detail.ruleset_id)}">
  <h2>${esc(detail.ruleset_id)}</h2>
  <pre class="ruleset-text">${esc(detail.text)}</pre>
  <table class="objectives"><tbody>${objectiveRows(detail.objectives)}</tbody></table>
  <p class="break-even">break-even: ${breakEven.per_record ?? "∞"} per record, ${breakEven.per_loc ?? "∞"} per line</p>
  <table class="attribution">
    <thead><tr><th>rule</th><th>saved records</th><th>missed remarks</th><th></th></tr></thead>
    <tbody>${rows}</tbody>
  </table>
</section>`.trim();
}
