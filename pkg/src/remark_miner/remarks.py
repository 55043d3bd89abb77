"""Turn review-commit changes into (merged, filtered) review remarks.

Change parts in one review commit that represent the same textual change are
merged into one remark; whitespace-only, import-only, and derived-file
remarks are removed and counted.
"""

from __future__ import annotations

import re

from .model import CommitRecord, Dataset, Remark

_IMPORT_LINE = re.compile(r"^\s*(package\b|import\b|using\b|#\s*include\b)")


def _normalized_change(old_lines, new_lines) -> str:
    old = "\n".join(l.strip() for l in old_lines)
    new = "\n".join(l.strip() for l in new_lines)
    return old + "\x00" + new


def _is_whitespace_only(old_lines, new_lines) -> bool:
    strip = lambda lines: "".join(ch for l in lines for ch in l if not ch.isspace())
    return strip(old_lines) == strip(new_lines)


def _is_import_only(old_lines, new_lines) -> bool:
    changed = [l for l in (*old_lines, *new_lines) if l.strip()]
    return bool(changed) and all(_IMPORT_LINE.match(l) for l in changed)


def _extension(path: str) -> str:
    basename = path.rsplit("/", 1)[-1]
    return basename.rsplit(".", 1)[-1].lower() if "." in basename else ""


def extract_remarks(
    review_commits: list[CommitRecord],
    derived_extensions: tuple[str, ...] = ("jav",),
    counters: dict | None = None,
) -> list[Remark]:
    counters = counters if counters is not None else {}
    out: list[Remark] = []
    for commit in review_commits:
        groups: dict[str, list[tuple[str, int]]] = {}
        texts: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {}
        spans: dict[tuple[str, int], tuple[int, int] | None] = {}
        for fc in commit.file_changes:
            if fc.hunks:
                for i, h in enumerate(fc.hunks):
                    key = _normalized_change(h.old_lines, h.new_lines)
                    groups.setdefault(key, []).append((fc.path, i))
                    texts[key] = (h.old_lines, h.new_lines)
                    spans[(fc.path, i)] = (h.new_start, h.new_start + max(h.new_len, 1) - 1)
            else:
                # hunkless change (binary, pure rename/copy): never merged
                key = f"\x01{fc.change_type}\x00{fc.path}"
                groups[key] = [(fc.path, -1)]
                texts[key] = ((), ())
                spans[(fc.path, -1)] = None

        merged = sorted(
            groups.items(), key=lambda kv: (min(kv[1]), kv[0])
        )
        counters["remarks_merged_away"] = counters.get("remarks_merged_away", 0) + sum(
            len(sites) - 1 for _, sites in merged
        )
        index = 0
        for key, sites in merged:
            sites = sorted(sites)
            old_lines, new_lines = texts[key]
            textual = not key.startswith("\x01")
            flags = []
            if textual and _is_whitespace_only(old_lines, new_lines):
                flags.append("whitespace_only")
            if textual and _is_import_only(old_lines, new_lines):
                flags.append("import_only")
            if any(_extension(path) in derived_extensions for path, _ in sites):
                flags.append("derived")
            if flags:
                for flag in flags:
                    counters[f"remarks_{flag}"] = counters.get(f"remarks_{flag}", 0) + 1
                continue
            out.append(
                Remark(
                    remark_id=f"{commit.commit_id}:r{index}",
                    ticket_id=commit.ticket_id,
                    review_commit_id=commit.commit_id,
                    file=sites[0][0],
                    line_range=spans[sites[0]],
                    content_key=key,
                    kind_flags=(),
                    merged_count=len(sites),
                    sites=tuple(sites),
                )
            )
            index += 1
    return out


def clean_dataset(dataset: Dataset, exclusion_list: list[tuple[str, str]]) -> Dataset:
    """Move the listed tickets into excluded_tickets and refresh statistics."""
    import logging

    for ticket_id, reason in exclusion_list:
        if ticket_id not in dataset.tickets:
            logging.getLogger(__name__).warning(
                "exclusion list names unknown ticket %s", ticket_id
            )
            continue
        del dataset.tickets[ticket_id]
        dataset.excluded_tickets.append((ticket_id, reason))
    dataset.stats["tickets"] = len(dataset.tickets)
    dataset.stats["records"] = sum(len(t.records) for t in dataset.tickets.values())
    dataset.stats["remarks"] = sum(len(t.remarks) for t in dataset.tickets.values())
    return dataset
