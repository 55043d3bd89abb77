"""Single-hop blame tracing per remark and agreement classification.

The blame walk finds the last change to each remark line before the review
commit: no skipping of foreign commits, no scope widening. Categories
compare its result with the scope-expanding tracer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .history import HistoryIndex, hunk_touches_range
from .model import Dataset, Remark, TriggerLink

SAME = "SAME"
INCOMPLETE = "INCOMPLETE"
DIFFERENT_STUCK = "DIFFERENT_STUCK"
DIFFERENT_NO_SCOPE = "DIFFERENT_NO_SCOPE"

CATEGORIES = (SAME, INCOMPLETE, DIFFERENT_STUCK, DIFFERENT_NO_SCOPE)


@dataclass
class SzzResult:
    remark_id: str
    found_commit: str | None = None
    found_hunks: set[str] = field(default_factory=set)
    found_commits: set[str] = field(default_factory=set)


def _map_line_back(change, line):
    """The hunk that last wrote a new-side line (rewrite or insertion), or
    the line's old-side position when the change left it alone."""
    shift = 0
    for h in change.hunks:
        if h.new_len > 0:
            if line < h.new_start:
                break
            if line <= h.new_start + h.new_len - 1:
                return ("hit", h)
            shift += h.old_len - h.new_len
        else:
            if line <= h.new_start:
                break
            shift += h.old_len
    return ("pos", line + shift)


def szz_trace(remark: Remark, dataset: Dataset, index: HistoryIndex) -> SzzResult:
    """Blame each old-side remark line to its last previous change."""
    result = SzzResult(remark_id=remark.remark_id)
    commit = dataset.commits[remark.review_commit_id]
    changes_by_path = {fc.path: fc for fc in commit.file_changes}
    best_pos = -1
    for path, hunk_index in remark.sites:
        fc = changes_by_path[path]
        if hunk_index < 0 or not fc.hunks or fc.path_old is None:
            continue
        hunk = fc.hunks[hunk_index]
        for line in range(hunk.old_start, hunk.old_start + hunk.old_len):
            pos = index.order[commit.commit_id]
            cur_path, cur_line = fc.path_old, line
            for event in index.walk_backwards(cur_path, pos):
                kind, val = _map_line_back(event.change, cur_line)
                if kind == "hit":
                    # blame stops at the change that last wrote the line,
                    # whether it rewrote or introduced it
                    i = event.change.hunks.index(val)
                    result.found_hunks.add(f"{event.commit.commit_id}:{event.change.path}:{i}")
                    result.found_commits.add(event.commit.commit_id)
                    if event.pos > best_pos:
                        best_pos = event.pos
                        result.found_commit = event.commit.commit_id
                    break
                cur_line = val
    return result


def classify(our_link: TriggerLink, szz_result: SzzResult, dataset: Dataset, ticket_id: str) -> str:
    if not szz_result.found_hunks:
        return DIFFERENT_NO_SCOPE
    for cid in sorted(szz_result.found_commits):
        commit = dataset.commits[cid]
        if commit.ticket_id != ticket_id or commit.phase != "IMPLEMENTATION":
            return DIFFERENT_STUCK
    ours = _effective_triggers(our_link, dataset, ticket_id)
    if szz_result.found_hunks == ours:
        return SAME
    if szz_result.found_hunks <= ours:
        return INCOMPLETE
    # blame landed on an implementation hunk the tracer did not keep;
    # does not arise with shared walk geometry, kept for totality
    return DIFFERENT_STUCK


def _effective_triggers(link: TriggerLink, dataset: Dataset, ticket_id: str) -> frozenset[str]:
    if link.whole_ticket:
        return frozenset(r.record_id for r in dataset.tickets[ticket_id].records)
    return link.triggers


def run_comparison(dataset: Dataset, per_raw_part: bool = False):
    """Classify every traced remark. Returns [(ticket_id, remark, category, weight)].

    By default each merged remark counts once; `per_raw_part` weights it by
    the number of raw change parts merged into it.
    """
    index = HistoryIndex(dataset)
    rows = []
    for ticket_id in sorted(dataset.tickets):
        ticket = dataset.tickets[ticket_id]
        links = {l.remark_id: l for l in ticket.trigger_links}
        for remark in sorted(ticket.remarks, key=lambda m: m.remark_id):
            link = links.get(remark.remark_id)
            if link is None:
                continue
            szz = szz_trace(remark, dataset, index)
            category = classify(link, szz, dataset, ticket_id)
            weight = remark.merged_count if per_raw_part else 1
            rows.append((ticket_id, remark, category, weight))
    return rows


def summarize(rows, extension: str = "java") -> dict:
    """Counts and percentages per category, overall and per file extension."""

    def bucket(selected):
        total = sum(w for _, _, _, w in selected)
        counts = {cat: 0 for cat in CATEGORIES}
        for _, _, cat, w in selected:
            counts[cat] += w
        percents = {
            cat: (100.0 * counts[cat] / total if total else 0.0) for cat in CATEGORIES
        }
        return {"total": total, "counts": counts, "percents": percents}

    ext_rows = [row for row in rows if row[1].file.endswith("." + extension)]
    return {
        "all_remarks": bucket(rows),
        f"{extension}_remarks": bucket(ext_rows),
        "extension": extension,
    }


def format_report(report: dict) -> str:
    lines = []
    width = max(len(c) for c in CATEGORIES)
    for section in ("all_remarks", f"{report['extension']}_remarks"):
        data = report[section]
        lines.append(f"{section} (n={data['total']})")
        for cat in CATEGORIES:
            lines.append(
                f"  {cat:<{width}}  {data['counts'][cat]:>6}  {data['percents'][cat]:6.1f}%"
            )
    return "\n".join(lines)


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
