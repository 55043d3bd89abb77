/** Paged review of sampled misclassified change parts: diff text, remark
 * context, and the rules that skipped each record ("why skipped"). */

import type { SampledRecord } from "../types.js";

export interface Page<T> {
  items: T[];
  page: number;
  pageCount: number;
}

export function paginate<T>(items: T[], page: number, pageSize: number): Page<T> {
  const pageCount = Math.max(1, Math.ceil(items.length / pageSize));
  const clamped = Math.min(Math.max(page, 0), pageCount - 1);
  return {
    items: items.slice(clamped * pageSize, (clamped + 1) * pageSize),
    page: clamped,
    pageCount,
  };
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function diffBlock(record: SampledRecord): string {
  const old = record.diff_old.map((l) => `<del>- ${esc(l)}</del>`).join("\n");
  const neu = record.diff_new.map((l) => `<ins>+ ${esc(l)}</ins>`).join("\n");
  return `<pre class="diff">${[old, neu].filter(Boolean).join("\n")}</pre>`;
}

export function renderSampleReview(page: Page<SampledRecord>): string {
  const cards = page.items
    .map((record) => {
      const why = record.matching_rules
        .map((rule) => `<li class="why-skipped"><code>${esc(rule)}</code></li>`)
        .join("\n");
      const remarks = record.remarks.map((r) => `<code>${esc(r)}</code>`).join(", ");
      return `
<article class="sampled-record" data-record="${esc(record.record_id)}">
  <h3>${esc(record.record_id)}</h3>
  <p class="meta">${esc(record.ticket_id)} · ${esc(record.path)}</p>
  ${diffBlock(record)}
  <p class="remarks">would miss: ${remarks || "—"}</p>
  <p>why skipped:</p>
  <ul class="rules">${why}</ul>
</article>`.trim();
    })
    .join("\n");
  return `
<section class="sample-review">
  ${cards || '<p class="empty">no misclassified records for this ruleset</p>'}
  <nav class="pager">
    <button class="prev"${page.page === 0 ? " disabled" : ""}>prev</button>
    <span>${page.page + 1} / ${page.pageCount}</span>
    <button class="next"${page.page >= page.pageCount - 1 ? " disabled" : ""}>next</button>
  </nav>
</section>`.trim();
}
