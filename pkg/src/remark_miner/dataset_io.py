"""Dataset persistence: line-delimited JSON with a leading header object.

The writer is deterministic (sorted keys, fixed ordering), so persisting
the same dataset twice yields byte-identical files.
"""

from __future__ import annotations

import json

from .model import (
    ABSENT,
    SCHEMA_VERSION,
    ChangePartRecord,
    CommitRecord,
    DataError,
    Dataset,
    FileChange,
    Hunk,
    Remark,
    TicketData,
    TicketTimeline,
    TriggerLink,
)

_ABSENT_TOKEN = "\u0000ABSENT"


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _encode_features(features):
    if features is None:
        return None
    return {k: (_ABSENT_TOKEN if v is ABSENT else v) for k, v in features.items()}


def _decode_features(features):
    if features is None:
        return None
    return {k: (ABSENT if v == _ABSENT_TOKEN else v) for k, v in features.items()}


def _hunk_obj(h: Hunk):
    return {
        "os": h.old_start,
        "ol": h.old_len,
        "ns": h.new_start,
        "nl": h.new_len,
        "old": list(h.old_lines),
        "new": list(h.new_lines),
    }


def _hunk_from(obj):
    return Hunk(
        old_start=obj["os"],
        old_len=obj["ol"],
        new_start=obj["ns"],
        new_len=obj["nl"],
        old_lines=tuple(obj["old"]),
        new_lines=tuple(obj["new"]),
    )


def persist_dataset(dataset: Dataset, path) -> None:
    lines = []
    header = {
        "kind": "header",
        "schema_version": dataset.schema_version,
        "created_at": dataset.created_at,
        "repo_path": dataset.repo_path,
        "entropy_log_base": dataset.entropy_log_base,
        "ngram_order": dataset.ngram_order,
        "ngram_lambda": dataset.ngram_lambda,
        "commit_order": dataset.commit_order,
        "stats": dataset.stats,
    }
    lines.append(_dump(header))
    for cid in dataset.commit_order:
        c = dataset.commits[cid]
        lines.append(
            _dump(
                {
                    "kind": "commit",
                    "id": c.commit_id,
                    "ticket": c.ticket_id,
                    "author": c.author,
                    "ts": c.timestamp,
                    "phase": c.phase,
                    "files": [
                        {
                            "path_old": fc.path_old,
                            "path_new": fc.path_new,
                            "change_type": fc.change_type,
                            "binary": fc.binary,
                            "similarity": fc.similarity,
                            "new_line_count": fc.new_line_count,
                            "old_content": fc.old_content,
                            "hunks": [_hunk_obj(h) for h in fc.hunks],
                        }
                        for fc in c.file_changes
                    ],
                }
            )
        )
    for ticket_id in sorted(dataset.tickets):
        t = dataset.tickets[ticket_id]
        tl = t.timeline
        lines.append(
            _dump(
                {
                    "kind": "ticket",
                    "id": ticket_id,
                    "issue_type": t.issue_type,
                    "snapshot_commit": t.snapshot_commit,
                    "split_point": None if tl.split_point == float("inf") else tl.split_point,
                    "impl": list(tl.commit_ids_impl),
                    "review": list(tl.commit_ids_review),
                }
            )
        )
        for r in t.records:
            lines.append(
                _dump(
                    {
                        "kind": "record",
                        "id": r.record_id,
                        "ticket": r.ticket_id,
                        "commit": r.commit_id,
                        "path": r.path,
                        "hunk_index": r.hunk_index,
                        "whole_file": r.whole_file,
                        "hunk": _hunk_obj(r.hunk) if r.hunk else None,
                        "features": _encode_features(r.features),
                    }
                )
            )
        for m in t.remarks:
            lines.append(
                _dump(
                    {
                        "kind": "remark",
                        "id": m.remark_id,
                        "ticket": m.ticket_id,
                        "commit": m.review_commit_id,
                        "file": m.file,
                        "line_range": list(m.line_range) if m.line_range else None,
                        "content_key": m.content_key,
                        "kind_flags": list(m.kind_flags),
                        "merged_count": m.merged_count,
                        "sites": [list(s) for s in m.sites],
                    }
                )
            )
        for link in t.trigger_links:
            lines.append(
                _dump(
                    {
                        "kind": "link",
                        "remark": link.remark_id,
                        "ticket": ticket_id,
                        "triggers": sorted(link.triggers),
                        "whole_ticket": link.whole_ticket,
                        "found_at_scope": link.found_at_scope,
                    }
                )
            )
    for ticket_id, reason in sorted(dataset.excluded_tickets):
        lines.append(_dump({"kind": "ticket", "id": ticket_id, "excluded": True, "reason": reason}))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dataset(path) -> Dataset:
    try:
        with open(path, encoding="utf-8") as fh:
            raw_lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc}") from exc
    if not raw_lines:
        raise DataError(f"dataset {path} is empty")
    header = json.loads(raw_lines[0])
    if header.get("kind") != "header":
        raise DataError(f"dataset {path} does not start with a header object")
    version = header.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DataError(
            f"dataset schema_version {version} is not supported (expected {SCHEMA_VERSION})"
        )
    dataset = Dataset(
        schema_version=version,
        created_at=header["created_at"],
        repo_path=header.get("repo_path"),
        entropy_log_base=header.get("entropy_log_base", 2),
        ngram_order=header.get("ngram_order"),
        ngram_lambda=header.get("ngram_lambda"),
        commit_order=list(header.get("commit_order", [])),
        stats=dict(header.get("stats", {})),
    )
    links_by_ticket: dict[str, list[TriggerLink]] = {}
    for lineno, line in enumerate(raw_lines[1:], start=2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: malformed dataset line: {exc}") from exc
        kind = obj.get("kind")
        if kind == "commit":
            dataset.commits[obj["id"]] = CommitRecord(
                commit_id=obj["id"],
                ticket_id=obj["ticket"],
                author=obj["author"],
                timestamp=obj["ts"],
                phase=obj["phase"],
                file_changes=tuple(
                    FileChange(
                        path_old=f["path_old"],
                        path_new=f["path_new"],
                        change_type=f["change_type"],
                        binary=f["binary"],
                        similarity=f["similarity"],
                        new_line_count=f["new_line_count"],
                        old_content=f["old_content"],
                        hunks=tuple(_hunk_from(h) for h in f["hunks"]),
                    )
                    for f in obj["files"]
                ),
            )
        elif kind == "ticket":
            if obj.get("excluded"):
                dataset.excluded_tickets.append((obj["id"], obj["reason"]))
                continue
            split = obj["split_point"]
            dataset.tickets[obj["id"]] = TicketData(
                ticket_id=obj["id"],
                issue_type=obj.get("issue_type"),
                snapshot_commit=obj.get("snapshot_commit"),
                timeline=TicketTimeline(
                    ticket_id=obj["id"],
                    split_point=float("inf") if split is None else split,
                    commit_ids_impl=tuple(obj["impl"]),
                    commit_ids_review=tuple(obj["review"]),
                ),
            )
        elif kind == "record":
            dataset.tickets[obj["ticket"]].records.append(
                ChangePartRecord(
                    record_id=obj["id"],
                    ticket_id=obj["ticket"],
                    commit_id=obj["commit"],
                    path=obj["path"],
                    hunk_index=obj["hunk_index"],
                    whole_file=obj["whole_file"],
                    hunk=_hunk_from(obj["hunk"]) if obj["hunk"] else None,
                    features=_decode_features(obj["features"]),
                )
            )
        elif kind == "remark":
            dataset.tickets[obj["ticket"]].remarks.append(
                Remark(
                    remark_id=obj["id"],
                    ticket_id=obj["ticket"],
                    review_commit_id=obj["commit"],
                    file=obj["file"],
                    line_range=tuple(obj["line_range"]) if obj["line_range"] else None,
                    content_key=obj["content_key"],
                    kind_flags=tuple(obj["kind_flags"]),
                    merged_count=obj["merged_count"],
                    sites=tuple((s[0], s[1]) for s in obj["sites"]),
                )
            )
        elif kind == "link":
            links_by_ticket.setdefault(obj["ticket"], []).append(
                TriggerLink(
                    remark_id=obj["remark"],
                    triggers=frozenset(obj["triggers"]),
                    whole_ticket=obj["whole_ticket"],
                    found_at_scope=obj["found_at_scope"],
                )
            )
        else:
            raise DataError(f"{path}:{lineno}: unknown record kind {kind!r}")
    for ticket_id, links in links_by_ticket.items():
        dataset.tickets[ticket_id].trigger_links = links
    dataset.validate()
    return dataset
