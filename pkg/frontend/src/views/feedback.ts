/** Feedback console: blacklist / exclude-ticket / focus forms plus the
 * transcript of submitted commands with their reconciliation state. */

import type { TranscriptEntry } from "../state.js";
import { ALL_OBJECTIVES } from "../types.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderFeedbackConsole(features: string[]): string {
  const featureOptions = features
    .map((f) => `<option value="${esc(f)}">${esc(f)}</option>`)
    .join("");
  const weightInputs = ALL_OBJECTIVES.map(
    (o) =>
      `<label class="weight">${o} <input type="number" step="0.1" min="0" name="w-${o}" value="0"/></label>`,
  ).join("\n");
  return `
<section class="feedback-console">
  <form id="blacklist-form">
    <select name="feature">${featureOptions}</select>
    <button type="submit">blacklist feature</button>
  </form>
  <form id="exclude-form">
    <input name="ticket" placeholder="ticket id"/>
    <button type="submit">exclude ticket</button>
  </form>
  <form id="focus-form">
    ${weightInputs}
    <button type="submit">set focus</button>
  </form>
</section>`.trim();
}

export function describeCommand(entry: TranscriptEntry): string {
  const c = entry.command;
  switch (c.command) {
    case "BLACKLIST_FEATURE":
      return `blacklist feature ${c.feature}`;
    case "EXCLUDE_TICKET":
      return `exclude ticket ${c.ticket}`;
    case "REJECT_RULE":
      return `reject rule ${c.rule_text}`;
    case "PIN_RULE":
      return `pin rule ${c.rule_text}`;
    case "SET_FOCUS": {
      const parts = Object.entries(c.weights ?? {})
        .filter(([, w]) => w !== 0)
        .map(([o, w]) => `${o}=${w}`);
      return `set focus ${parts.join(", ") || "(default)"}`;
    }
    case "PURGE_ARCHIVE":
      return `purge archive where ${c.predicate?.join(" ")}`;
  }
}

export function renderTranscript(transcript: TranscriptEntry[]): string {
  if (transcript.length === 0) {
    return `<ol class="transcript empty"></ol>`;
  }
  const items = transcript
    .map((entry) => {
      const delta =
        entry.archiveDelta !== undefined ? ` (archive ${entry.archiveDelta >= 0 ? "+" : ""}${entry.archiveDelta})` : "";
      const error = entry.error ? ` — ${esc(entry.error)}` : "";
      return `<li class="${entry.status}">${esc(describeCommand(entry))}${delta}${error}</li>`;
    })
    .join("\n");
  return `<ol class="transcript">${items}</ol>`;
}
