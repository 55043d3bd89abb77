"""Repository walking, ticket-log ingestion, and ticket phase splitting.

Commits are read along first-parent order with zero-context diffs, so every
hunk is exactly one change part. A line-delimited JSON event log substitutes
for a live ticket tracker: reproducible and easy to fixture.
"""

from __future__ import annotations

import json
import logging
import math
import re
import subprocess
from dataclasses import dataclass, replace
from datetime import datetime, timezone

from .model import (
    BINARY_SIZE_THRESHOLD,
    ChangePartRecord,
    CommitRecord,
    DataError,
    Dataset,
    FileChange,
    Hunk,
    TicketData,
    TicketEvent,
    TicketTimeline,
)

log = logging.getLogger(__name__)

_HUNK_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")
_RAW_STATUS = {"M": "MODIFY", "A": "ADD", "D": "DELETE", "R": "RENAME", "C": "COPY"}

EMPTY_TREE = "4b825dc642cb6eb9a060e54bf8d69288fbee4904"


@dataclass
class ScanResult:
    commits: list[CommitRecord]
    skipped_commits: int = 0


class DegenerateTimelineError(DataError):
    """The first review event precedes all implementation activity."""


def _git(repo_path, *args, binary=False):
    try:
        out = subprocess.run(
            ["git", "-C", str(repo_path), "-c", "core.quotePath=false", *args],
            capture_output=True,
            check=True,
        )
    except FileNotFoundError as exc:
        raise DataError("git executable not found") from exc
    except subprocess.CalledProcessError as exc:
        raise DataError(
            f"git {' '.join(args[:2])} failed in {repo_path}: {exc.stderr.decode(errors='replace').strip()}"
        ) from exc
    return out.stdout if binary else out.stdout.decode("utf-8", errors="replace")


def scan_repository(repo_path, ticket_id_pattern: str) -> ScanResult:
    """Walk first-parent history and extract one CommitRecord per commit.

    The ticket id is the first capture of `ticket_id_pattern` in the commit
    message; commits without a match are dropped and counted.
    """
    try:
        pattern = re.compile(ticket_id_pattern)
    except re.error as exc:
        raise DataError(f"malformed ticket pattern {ticket_id_pattern!r}: {exc}") from exc
    if pattern.groups < 1:
        raise DataError("ticket pattern needs one capture group")

    meta = _git(
        repo_path, "log", "--first-parent", "--reverse", "--format=%H%x00%an%x00%at%x00%B%x1e"
    )
    commits: list[CommitRecord] = []
    skipped = 0
    prev_sha = None
    for chunk in meta.split("\x1e"):
        chunk = chunk.lstrip("\n")
        if not chunk.strip():
            continue
        sha, author, ts, message = chunk.split("\x00", 3)
        match = pattern.search(message)
        ticket_id = match.group(1) if match else None
        if ticket_id is None:
            skipped += 1
        file_changes = _read_commit_diff(repo_path, prev_sha or EMPTY_TREE, sha)
        if ticket_id is not None:
            commits.append(
                CommitRecord(
                    commit_id=sha,
                    ticket_id=ticket_id,
                    author=author,
                    timestamp=int(ts),
                    file_changes=tuple(file_changes),
                )
            )
        else:
            # keep unticketed commits: their edits still shift line numbers
            commits.append(
                CommitRecord(
                    commit_id=sha,
                    ticket_id=None,
                    author=author,
                    timestamp=int(ts),
                    file_changes=tuple(file_changes),
                )
            )
        prev_sha = sha
    return ScanResult(commits=commits, skipped_commits=skipped)


def _read_commit_diff(repo_path, base, sha) -> list[FileChange]:
    raw = _git(repo_path, "diff", "--raw", "-z", "--find-renames", "--find-copies", base, sha)
    skeletons = []
    fields = raw.split("\0")
    i = 0
    while i < len(fields) and fields[i]:
        header = fields[i]
        status = header.rsplit(" ", 1)[-1]
        kind = _RAW_STATUS.get(status[0], "MODIFY")
        similarity = int(status[1:]) if status[1:].isdigit() else 0
        if kind in ("RENAME", "COPY"):
            path_old, path_new = fields[i + 1], fields[i + 2]
            i += 3
        elif kind == "DELETE":
            path_old, path_new = fields[i + 1], None
            i += 2
        elif kind == "ADD":
            path_old, path_new = None, fields[i + 1]
            i += 2
        else:
            path_old = path_new = fields[i + 1]
            i += 2
        skeletons.append((kind, similarity, path_old, path_new))

    patch = _git(repo_path, "diff", "--unified=0", "--find-renames", "--find-copies", base, sha)
    hunks_by_path, binary_paths = _parse_patch(patch)

    changes = []
    for kind, similarity, path_old, path_new in skeletons:
        addressed = path_new if path_new is not None else path_old
        hunks = tuple(hunks_by_path.get(addressed, ()))
        binary = addressed in binary_paths
        old_text = _show_blob(repo_path, base, path_old) if path_old is not None else None
        new_text = _show_blob(repo_path, sha, path_new) if path_new is not None else None
        size = len(new_text if new_text is not None else old_text or b"")
        if size >= BINARY_SIZE_THRESHOLD:
            binary = True
        if binary:
            hunks = ()
            new_line_count = None
        else:
            new_line_count = _line_count(new_text) if new_text is not None else None
        if kind == "MODIFY" and not binary:
            similarity = _content_similarity(old_text, new_text)
        elif kind in ("RENAME", "COPY") and similarity == 0 and not hunks:
            similarity = 100
        changes.append(
            FileChange(
                path_old=path_old,
                path_new=path_new,
                change_type=kind,
                binary=binary,
                similarity=similarity,
                hunks=hunks,
                new_line_count=new_line_count,
            )
        )
    changes.sort(key=lambda fc: fc.path)
    return changes


def _show_blob(repo_path, rev, path):
    if rev is None or path is None:
        return None
    try:
        return _git(repo_path, "show", f"{rev}:{path}", binary=True)
    except DataError:
        return None


def _line_count(blob: bytes) -> int:
    if not blob:
        return 0
    n = blob.count(b"\n")
    return n if blob.endswith(b"\n") else n + 1


def _content_similarity(old_text, new_text) -> int:
    import difflib

    if old_text is None or new_text is None:
        return 0
    if old_text == new_text:
        return 100
    old_lines = old_text.decode("utf-8", errors="replace").splitlines()
    new_lines = new_text.decode("utf-8", errors="replace").splitlines()
    ratio = difflib.SequenceMatcher(a=old_lines, b=new_lines, autojunk=False).ratio()
    return min(99, int(ratio * 100))


def _parse_patch(patch: str):
    hunks_by_path: dict[str, list[Hunk]] = {}
    binary_paths: set[str] = set()
    current_path = None
    current = None  # mutable hunk under construction
    old_lines: list[str] = []
    new_lines: list[str] = []

    def flush():
        nonlocal current
        if current is not None:
            hunks_by_path.setdefault(current_path, []).append(
                Hunk(
                    old_start=current[0],
                    old_len=current[1],
                    new_start=current[2],
                    new_len=current[3],
                    old_lines=tuple(old_lines),
                    new_lines=tuple(new_lines),
                )
            )
        current = None
        old_lines.clear()
        new_lines.clear()

    for line in patch.split("\n"):
        if line.startswith("diff --git "):
            flush()
            current_path = None
        elif line.startswith("+++ "):
            target = line[4:]
            if target != "/dev/null":
                current_path = target[2:] if target.startswith("b/") else target
        elif line.startswith("--- ") and current_path is None:
            source = line[4:]
            if source != "/dev/null":
                current_path = source[2:] if source.startswith("a/") else source
        elif line.startswith("Binary files ") or line.startswith("GIT binary patch"):
            m = re.match(r"^Binary files (.+) and (.+) differ$", line)
            if m:
                for operand, prefix in ((m.group(2), "b/"), (m.group(1), "a/")):
                    if operand != "/dev/null":
                        current_path = (
                            operand[2:] if operand.startswith(prefix) else operand
                        )
                        break
            if current_path is not None:
                binary_paths.add(current_path)
        elif line.startswith("@@ "):
            flush()
            m = _HUNK_RE.match(line)
            if m:
                current = [
                    int(m.group(1)),
                    int(m.group(2) or "1"),
                    int(m.group(3)),
                    int(m.group(4) or "1"),
                ]
        elif current is not None:
            if line.startswith("-"):
                old_lines.append(line[1:])
            elif line.startswith("+"):
                new_lines.append(line[1:])
            # "\ No newline at end of file" markers are dropped
    flush()
    return hunks_by_path, binary_paths


def ingest_ticket_log(path) -> list[TicketEvent]:
    """Parse the line-delimited ticket event log, sorted per ticket."""
    events = []
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read ticket log {path}: {exc}") from exc
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: malformed ticket event: {exc}") from exc
        try:
            state = obj["state"]
            if state not in (
                "IN_IMPLEMENTATION",
                "READY_FOR_REVIEW",
                "IN_REVIEW",
                "REVIEW_REJECTED",
                "DONE",
            ):
                raise DataError(f"{path}:{lineno}: unknown ticket state {state!r}")
            events.append(
                TicketEvent(
                    ticket_id=str(obj["ticket"]),
                    timestamp=int(obj["ts"]),
                    new_state=state,
                    issue_type=obj.get("issue_type"),
                )
            )
        except KeyError as exc:
            raise DataError(f"{path}:{lineno}: missing field {exc}") from exc
    if not events:
        log.warning("ticket log %s is empty", path)
    events.sort(key=lambda e: (e.ticket_id, e.timestamp))
    return events


def build_timeline(ticket_events: list[TicketEvent], commits: list[CommitRecord]) -> TicketTimeline:
    """Split a ticket's commits into implementation and review phases.

    The split point is the midpoint between the end of the last
    pre-review implementation interval and the start of the first review.
    Timestamp ties classify as REVIEW.
    """
    if not commits:
        raise DataError("build_timeline needs at least one commit")
    ticket_id = commits[0].ticket_id
    events = sorted(ticket_events, key=lambda e: e.timestamp)

    first_review_ts = next(
        (e.timestamp for e in events if e.new_state == "IN_REVIEW"), None
    )
    if first_review_ts is None:
        split = math.inf
    else:
        impl_end = None
        in_impl = False
        for event in events:
            if event.timestamp > first_review_ts:
                break
            if in_impl and event.new_state != "IN_IMPLEMENTATION":
                impl_end = event.timestamp
            in_impl = event.new_state == "IN_IMPLEMENTATION"
        if in_impl:
            impl_end = first_review_ts
        if impl_end is None:
            raise DegenerateTimelineError(
                f"ticket {ticket_id}: first review at {first_review_ts} precedes all implementation activity"
            )
        split = (impl_end + first_review_ts) / 2

    impl = tuple(c.commit_id for c in commits if c.timestamp < split)
    review = tuple(c.commit_id for c in commits if c.timestamp >= split)
    return TicketTimeline(
        ticket_id=ticket_id,
        split_point=split,
        commit_ids_impl=impl,
        commit_ids_review=review,
    )


def records_for_change(commit: CommitRecord, fc: FileChange) -> list[ChangePartRecord]:
    """Change parts of one file change: one per hunk, or one synthetic
    whole-file part for hunkless changes (binary, pure rename/copy)."""
    if fc.hunks:
        return [
            ChangePartRecord(
                record_id=f"{commit.commit_id}:{fc.path}:{i}",
                ticket_id=commit.ticket_id,
                commit_id=commit.commit_id,
                path=fc.path,
                hunk_index=i,
                hunk=h,
            )
            for i, h in enumerate(fc.hunks)
        ]
    return [
        ChangePartRecord(
            record_id=f"{commit.commit_id}:{fc.path}:whole",
            ticket_id=commit.ticket_id,
            commit_id=commit.commit_id,
            path=fc.path,
            hunk_index=-1,
            hunk=None,
            whole_file=True,
        )
    ]


def assemble_dataset(
    commits: list[CommitRecord],
    events: list[TicketEvent],
    repo_path: str | None = None,
    skipped_commits: int = 0,
    enrich_old_content=None,
    derived_extensions: tuple[str, ...] = ("jav",),
) -> Dataset:
    """Group commits by ticket, split phases, and extract records and remarks.

    `enrich_old_content(commit, file_change) -> str | None` supplies the
    pre-commit file text for review-commit changes, which tracing needs to
    build scope trees.
    """
    from . import remarks as remarks_mod

    events_by_ticket: dict[str, list[TicketEvent]] = {}
    for e in events:
        events_by_ticket.setdefault(e.ticket_id, []).append(e)

    by_ticket: dict[str, list[CommitRecord]] = {}
    for c in commits:
        if c.ticket_id is not None:
            by_ticket.setdefault(c.ticket_id, []).append(c)

    pos = {c.commit_id: i for i, c in enumerate(commits)}
    dataset = Dataset(
        repo_path=str(repo_path) if repo_path is not None else None,
        commit_order=[c.commit_id for c in commits],
        stats={"commits_without_ticket": skipped_commits},
    )

    all_commits: dict[str, CommitRecord] = {c.commit_id: c for c in commits}

    for ticket_id in sorted(by_ticket):
        ticket_commits = sorted(by_ticket[ticket_id], key=lambda c: pos[c.commit_id])
        ticket_events = events_by_ticket.get(ticket_id, [])
        try:
            timeline = build_timeline(ticket_events, ticket_commits)
        except DegenerateTimelineError as exc:
            dataset.excluded_tickets.append((ticket_id, str(exc)))
            continue
        issue_type = next((e.issue_type for e in ticket_events if e.issue_type), None)

        review_ids = set(timeline.commit_ids_review)
        for c in ticket_commits:
            phase = "REVIEW" if c.commit_id in review_ids else "IMPLEMENTATION"
            updated = c.with_phase(phase)
            if phase == "REVIEW" and enrich_old_content is not None:
                changes = []
                for fc in updated.file_changes:
                    if fc.old_content is None and fc.path_old is not None and not fc.binary:
                        fc = replace(fc, old_content=enrich_old_content(c, fc))
                    changes.append(fc)
                updated = replace(updated, file_changes=tuple(changes))
            all_commits[c.commit_id] = updated

        records = []
        for cid in timeline.commit_ids_impl:
            commit = all_commits[cid]
            for fc in commit.file_changes:
                records.extend(records_for_change(commit, fc))

        first_impl_pos = pos[timeline.commit_ids_impl[0]] if timeline.commit_ids_impl else None
        snapshot = (
            dataset.commit_order[first_impl_pos - 1]
            if first_impl_pos not in (None, 0)
            else None
        )

        ticket_remarks = remarks_mod.extract_remarks(
            [all_commits[cid] for cid in timeline.commit_ids_review],
            derived_extensions=derived_extensions,
            counters=dataset.stats,
        )
        dataset.tickets[ticket_id] = TicketData(
            ticket_id=ticket_id,
            timeline=timeline,
            issue_type=issue_type,
            snapshot_commit=snapshot,
            records=records,
            remarks=ticket_remarks,
        )

    dataset.commits = all_commits
    dataset.created_at = _derive_created_at(commits, events)
    dataset.validate()
    return dataset


def _derive_created_at(commits, events) -> str:
    latest = max(
        [c.timestamp for c in commits] + [e.timestamp for e in events], default=0
    )
    return datetime.fromtimestamp(latest, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def extract_old_contents_from_git(repo_path, commit_order):
    """Old-content supplier backed by `git show` against the first parent."""
    order = {cid: i for i, cid in enumerate(commit_order)}

    def fetch(commit: CommitRecord, fc: FileChange) -> str | None:
        idx = order.get(commit.commit_id, 0)
        base = commit_order[idx - 1] if idx > 0 else None
        if base is None or fc.path_old is None:
            return None
        blob = _show_blob(repo_path, base, fc.path_old)
        return blob.decode("utf-8", errors="replace") if blob is not None else None

    return fetch
