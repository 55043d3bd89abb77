"""Synthetic first-parent histories for oracle tests.

RepoSim keeps file contents in memory, derives zero-context hunks from real
line diffs (difflib opcodes), and assembles Datasets through the production
grouping/timeline/remark code, so tests exercise the same structures the git
scanner produces.
"""

from __future__ import annotations

import difflib

from remark_miner.ingest import assemble_dataset
from remark_miner.model import (
    ABSENT,
    CommitRecord,
    Dataset,
    FileChange,
    Hunk,
    TicketEvent,
)

DAY = 86400


def diff_hunks(old_lines, new_lines):
    """Zero-context hunks between two line lists, unified-diff numbering."""
    matcher = difflib.SequenceMatcher(a=old_lines, b=new_lines, autojunk=False)
    hunks = []
    for tag, i1, i2, j1, j2 in matcher.get_opcodes():
        if tag == "equal":
            continue
        hunks.append(
            Hunk(
                old_start=i1 + 1 if i2 > i1 else i1,
                old_len=i2 - i1,
                new_start=j1 + 1 if j2 > j1 else j1,
                new_len=j2 - j1,
                old_lines=tuple(old_lines[i1:i2]),
                new_lines=tuple(new_lines[j1:j2]),
            )
        )
    return hunks


def _similarity(old_lines, new_lines) -> int:
    if old_lines == new_lines:
        return 100
    ratio = difflib.SequenceMatcher(a=old_lines, b=new_lines, autojunk=False).ratio()
    return min(99, int(ratio * 100))


class RepoSim:
    """In-memory repository: apply edits, get CommitRecords with real hunks."""

    def __init__(self):
        self.files: dict[str, list[str]] = {}
        self.binaries: set[str] = set()
        self.commits: list[CommitRecord] = []
        self._old_contents: dict[tuple[str, str], str] = {}
        self._clock = 0

    def commit(self, ticket, edits, author="dev", ts=None) -> str:
        """edits: list of operations
        ("add", path, lines) | ("edit", path, new_lines) | ("delete", path)
        | ("rename", old, new) | ("rename_edit", old, new, new_lines)
        | ("binary_add", path) | ("binary_edit", path)
        """
        if ts is None:
            self._clock += 10
            ts = self._clock
        else:
            self._clock = ts
        cid = f"c{len(self.commits):03d}"
        changes = []
        for op in edits:
            kind = op[0]
            if kind == "add":
                _, path, lines = op
                assert path not in self.files
                self.files[path] = list(lines)
                changes.append(
                    FileChange(
                        path_old=None,
                        path_new=path,
                        change_type="ADD",
                        hunks=tuple(diff_hunks([], lines)),
                        new_line_count=len(lines),
                    )
                )
            elif kind == "edit":
                _, path, lines = op
                old = self.files[path]
                if list(lines) == old:
                    continue  # git records no change for identical content
                self._stash(cid, path, old)
                changes.append(
                    FileChange(
                        path_old=path,
                        path_new=path,
                        change_type="MODIFY",
                        similarity=_similarity(old, list(lines)),
                        hunks=tuple(diff_hunks(old, list(lines))),
                        new_line_count=len(lines),
                    )
                )
                self.files[path] = list(lines)
            elif kind == "delete":
                _, path = op
                old = self.files.pop(path)
                self._stash(cid, path, old)
                changes.append(
                    FileChange(
                        path_old=path,
                        path_new=None,
                        change_type="DELETE",
                        hunks=tuple(diff_hunks(old, [])),
                        new_line_count=None,
                    )
                )
            elif kind in ("rename", "rename_edit"):
                if kind == "rename":
                    _, old_path, new_path = op
                    lines = self.files[old_path]
                else:
                    _, old_path, new_path, lines = op
                old = self.files.pop(old_path)
                self._stash(cid, old_path, old)
                self.files[new_path] = list(lines)
                changes.append(
                    FileChange(
                        path_old=old_path,
                        path_new=new_path,
                        change_type="RENAME",
                        similarity=_similarity(old, list(lines)),
                        hunks=tuple(diff_hunks(old, list(lines))),
                        new_line_count=len(lines),
                    )
                )
            elif kind == "binary_add":
                _, path = op
                self.binaries.add(path)
                changes.append(
                    FileChange(
                        path_old=None, path_new=path, change_type="ADD", binary=True
                    )
                )
            elif kind == "binary_edit":
                _, path = op
                assert path in self.binaries
                changes.append(
                    FileChange(
                        path_old=path, path_new=path, change_type="MODIFY", binary=True
                    )
                )
            else:
                raise ValueError(f"unknown edit op {kind!r}")
        changes.sort(key=lambda fc: fc.path)
        self.commits.append(
            CommitRecord(
                commit_id=cid,
                ticket_id=ticket,
                author=author,
                timestamp=ts,
                file_changes=tuple(changes),
            )
        )
        return cid

    def _stash(self, cid, path, lines):
        self._old_contents[(cid, path)] = "\n".join(lines) + ("\n" if lines else "")

    def old_content(self, commit, fc):
        return self._old_contents.get((commit.commit_id, fc.path_old))

    def dataset(self, events: list[TicketEvent], **kwargs) -> Dataset:
        return assemble_dataset(
            self.commits, events, enrich_old_content=self.old_content, **kwargs
        )


def review_split_events(ticket, impl_end, review_start):
    """Minimal workflow: implementation from t=0, ready at impl_end, review
    at review_start. Split point lands midway between the two."""
    return [
        TicketEvent(ticket, 0, "IN_IMPLEMENTATION"),
        TicketEvent(ticket, impl_end, "READY_FOR_REVIEW"),
        TicketEvent(ticket, review_start, "IN_REVIEW"),
    ]


def make_feature_vector(**overrides) -> dict:
    """A full catalog vector with quiet defaults, for synthetic datasets."""
    from remark_miner.catalog import BOOLEAN, CATEGORICAL, FEATURE_KINDS, NUMERIC

    vector: dict = {}
    for name, kind in FEATURE_KINDS.items():
        if kind == NUMERIC:
            vector[name] = 0.0
        elif kind == BOOLEAN:
            vector[name] = False
        else:
            vector[name] = "none"
    vector.update(overrides)
    unknown = set(overrides) - set(FEATURE_KINDS)
    if unknown:
        raise ValueError(f"unknown features {sorted(unknown)}")
    return vector


_RANDOMIZED_NUMERIC = (
    "gitSimilarity", "oldHunkSize", "newHunkSize", "changeInHunkSize",
    "fileCountInCommit", "hunkCountInFile", "entropyCbMed", "fileAgeDays",
)
_RANDOMIZED_CATEGORICAL = ("filetype", "srcdir", "author", "changetype")
_RANDOMIZED_BOOLEAN = ("whitespaceOnly", "binary", "packageAndImportOnly")


def random_evaluation_dataset(rng, max_tickets=8, max_records=200) -> Dataset:
    """Synthetic traced+featured dataset for evaluator cross-checks."""
    from remark_miner.model import (
        ChangePartRecord,
        Remark,
        TicketData,
        TicketTimeline,
        TriggerLink,
    )

    dataset = Dataset()
    budget = rng.randint(1, max_records)
    n_tickets = rng.randint(1, max_tickets)
    counter = 0
    for t in range(n_tickets):
        tid = f"T-{t}"
        ticket = TicketData(
            ticket_id=tid,
            timeline=TicketTimeline(ticket_id=tid, split_point=float("inf")),
        )
        n_records = min(budget, rng.randint(0, 40))
        budget -= n_records
        for i in range(n_records):
            features = make_feature_vector()
            for name in _RANDOMIZED_NUMERIC:
                roll = rng.random()
                features[name] = (
                    ABSENT if roll < 0.1 else float(rng.choice((0, 1, 2, 5, 10, 50, 99, 150)))
                )
            for name in _RANDOMIZED_CATEGORICAL:
                features[name] = rng.choice(("java", "xml", "txt", "alice", "bob", "MODIFY"))
            for name in _RANDOMIZED_BOOLEAN:
                features[name] = rng.random() < 0.3
            old_len = rng.randint(0, 6)
            new_len = rng.randint(0, 6)
            if old_len == new_len == 0:
                new_len = 1
            path = f"proj/F{i % 5}." + rng.choice(("java", "txt"))
            counter += 1
            ticket.records.append(
                ChangePartRecord(
                    record_id=f"{tid}:c0:{counter}",
                    ticket_id=tid,
                    commit_id=f"{tid}:c0",
                    path=path,
                    hunk_index=0,
                    hunk=Hunk(
                        old_start=1,
                        old_len=old_len,
                        new_start=1,
                        new_len=new_len,
                        old_lines=("x",) * old_len,
                        new_lines=("y",) * new_len,
                    ),
                    features=features,
                )
            )
        for m in range(rng.randint(0, 5)):
            remark_id = f"{tid}:r{m}"
            ticket.remarks.append(
                Remark(
                    remark_id=remark_id,
                    ticket_id=tid,
                    review_commit_id=f"{tid}:rv",
                    file="proj/F0.java",
                    line_range=(1, 1),
                    content_key=f"k{m}",
                )
            )
            if not ticket.records or rng.random() < 0.15:
                ticket.trigger_links.append(
                    TriggerLink(remark_id=remark_id, whole_ticket=True)
                )
            else:
                size = rng.randint(1, min(4, len(ticket.records)))
                chosen = rng.sample([r.record_id for r in ticket.records], size)
                ticket.trigger_links.append(
                    TriggerLink(remark_id=remark_id, triggers=frozenset(chosen))
                )
        dataset.tickets[tid] = ticket
    return dataset
