"""Core domain types shared by the whole pipeline.

Everything here is plain data: immutable after construction, comparable,
and serializable by dataset_io. The unit of skipping is the change part
(one diff hunk of an implementation commit); changes in review commits
become remarks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

SCHEMA_VERSION = 1

# Commit phases
IMPLEMENTATION = "IMPLEMENTATION"
REVIEW = "REVIEW"

# Ticket workflow states
TICKET_STATES = (
    "IN_IMPLEMENTATION",
    "READY_FOR_REVIEW",
    "IN_REVIEW",
    "REVIEW_REJECTED",
    "DONE",
)

# Git change classification
CHANGE_TYPES = ("MODIFY", "ADD", "RENAME", "DELETE", "COPY")

# Text files at or above this size are treated as binary.
BINARY_SIZE_THRESHOLD = 1024 * 1024


class _Absent:
    """Singleton marker for inapplicable feature values (never a fake zero)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ABSENT"

    def __bool__(self):
        return False


ABSENT = _Absent()


@dataclass(frozen=True)
class Hunk:
    """One contiguous diff region, extracted with zero context lines."""

    old_start: int
    old_len: int
    new_start: int
    new_len: int
    old_lines: tuple[str, ...] = ()
    new_lines: tuple[str, ...] = ()

    def __post_init__(self):
        if self.old_len != len(self.old_lines) or self.new_len != len(self.new_lines):
            raise ValueError("hunk length fields must match line lists")
        if self.old_len == 0 and self.new_len == 0:
            raise ValueError("a hunk must change at least one line")


@dataclass(frozen=True)
class FileChange:
    """One file's change inside a commit.

    `new_line_count` is the total line count of the file after the commit
    (None for binary files and deletions). `old_content` is the pre-commit
    text, retained only where tracing needs to build a scope tree.
    """

    path_old: str | None
    path_new: str | None
    change_type: str
    binary: bool = False
    similarity: int = 0
    hunks: tuple[Hunk, ...] = ()
    new_line_count: int | None = None
    old_content: str | None = None

    @property
    def path(self) -> str:
        """The path the change is addressed by (new side, old for deletes)."""
        return self.path_new if self.path_new is not None else self.path_old


@dataclass(frozen=True)
class CommitRecord:
    commit_id: str
    ticket_id: str | None
    author: str
    timestamp: int
    file_changes: tuple[FileChange, ...] = ()
    phase: str | None = None

    def with_phase(self, phase: str) -> "CommitRecord":
        return replace(self, phase=phase)


@dataclass(frozen=True)
class TicketEvent:
    ticket_id: str
    timestamp: int
    new_state: str
    issue_type: str | None = None


@dataclass(frozen=True)
class TicketTimeline:
    ticket_id: str
    split_point: float  # UTC seconds; +inf when the ticket never reached review
    commit_ids_impl: tuple[str, ...] = ()
    commit_ids_review: tuple[str, ...] = ()

    @property
    def has_review_phase(self) -> bool:
        return math.isfinite(self.split_point)


@dataclass(frozen=True)
class ChangePartRecord:
    """One reviewable change part: a hunk of an implementation commit.

    Hunkless file changes (binary, pure rename/copy) yield one synthetic
    whole-file part so they can still act as triggers and be skipped.
    """

    record_id: str
    ticket_id: str
    commit_id: str
    path: str
    hunk_index: int
    hunk: Hunk | None = None
    whole_file: bool = False
    features: dict | None = None


@dataclass(frozen=True)
class Remark:
    """A (merged) change in a review commit, read as a fixed review finding."""

    remark_id: str
    ticket_id: str
    review_commit_id: str
    file: str
    line_range: tuple[int, int] | None  # new side
    content_key: str
    kind_flags: tuple[str, ...] = ()
    merged_count: int = 1
    # Constituent change sites as (path, hunk_index) into the review commit;
    # hunk_index -1 marks a synthetic whole-file part.
    sites: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class TriggerLink:
    remark_id: str
    triggers: frozenset[str] = frozenset()
    whole_ticket: bool = False
    found_at_scope: str = "LINE_RANGE"

    def __post_init__(self):
        if not self.triggers and not self.whole_ticket:
            raise ValueError("trigger link needs trigger ids or the whole-ticket marker")


@dataclass
class TicketData:
    ticket_id: str
    timeline: TicketTimeline
    issue_type: str | None = None
    snapshot_commit: str | None = None  # parent of the first implementation commit
    records: list[ChangePartRecord] = field(default_factory=list)
    remarks: list[Remark] = field(default_factory=list)
    trigger_links: list[TriggerLink] = field(default_factory=list)


@dataclass
class Dataset:
    schema_version: int = SCHEMA_VERSION
    created_at: str = "1970-01-01T00:00:00Z"
    repo_path: str | None = None
    entropy_log_base: int = 2
    ngram_order: int | None = None
    ngram_lambda: float | None = None
    commit_order: list[str] = field(default_factory=list)
    commits: dict[str, CommitRecord] = field(default_factory=dict)
    tickets: dict[str, TicketData] = field(default_factory=dict)
    excluded_tickets: list[tuple[str, str]] = field(default_factory=list)
    stats: dict[str, int] = field(default_factory=dict)

    def iter_records(self):
        for tid in sorted(self.tickets):
            yield from self.tickets[tid].records

    def record_by_id(self) -> dict[str, ChangePartRecord]:
        return {r.record_id: r for r in self.iter_records()}

    def validate(self) -> None:
        """Check referential integrity: unique record ids, resolvable links."""
        seen = set()
        for rec in self.iter_records():
            if rec.record_id in seen:
                raise ValueError(f"duplicate record id {rec.record_id}")
            seen.add(rec.record_id)
        for ticket in self.tickets.values():
            local = {r.record_id for r in ticket.records}
            for link in ticket.trigger_links:
                missing = link.triggers - local
                if missing:
                    raise ValueError(
                        f"trigger link {link.remark_id} references unknown records {sorted(missing)}"
                    )


class DataError(Exception):
    """Raised for unusable input data (bad files, version mismatch, parse errors)."""
