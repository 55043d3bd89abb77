"""First-parent file history index with line-coordinate remapping.

Tracing and blame both walk a file's change history backwards from a commit.
The index keys every FileChange by the path it is addressed by (new side,
old side for deletions) and follows rename/copy edges into the older name.
Line ranges are carried along the walk by hunk-offset arithmetic, so no
re-diffing is ever needed.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

from .model import CommitRecord, Dataset, FileChange, Hunk


@dataclass(frozen=True)
class HistoryEvent:
    pos: int  # first-parent order index
    commit: CommitRecord
    change: FileChange


class HistoryIndex:
    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self.order: dict[str, int] = {cid: i for i, cid in enumerate(dataset.commit_order)}
        self.by_path: dict[str, list[HistoryEvent]] = {}
        for cid in dataset.commit_order:
            commit = dataset.commits[cid]
            pos = self.order[cid]
            for fc in commit.file_changes:
                self.by_path.setdefault(fc.path, []).append(HistoryEvent(pos, commit, fc))
        self._positions = {
            path: [e.pos for e in events] for path, events in self.by_path.items()
        }

    def walk_backwards(self, path: str, before_pos: int):
        """Yield HistoryEvents for `path` strictly before `before_pos`, newest
        first, following rename/copy edges and stopping at the file's birth."""
        while True:
            events = self.by_path.get(path)
            if not events:
                return
            idx = bisect_left(self._positions[path], before_pos) - 1
            while idx >= 0:
                event = events[idx]
                yield event
                if event.change.change_type == "ADD":
                    return
                if event.change.change_type in ("RENAME", "COPY"):
                    path = event.change.path_old
                    before_pos = event.pos
                    break
                idx -= 1
            else:
                return


def hunk_new_span(hunk: Hunk) -> tuple[int, int] | None:
    if hunk.new_len == 0:
        return None
    return hunk.new_start, hunk.new_start + hunk.new_len - 1


def hunk_touches_range(hunk: Hunk, lo: int, hi: int) -> bool:
    """Does the hunk change anything inside [lo, hi] (new-side coordinates)?

    A pure deletion sits between two new-side lines; it touches the range
    only when both surrounding lines are interior to it.
    """
    span = hunk_new_span(hunk)
    if span is None:
        return lo <= hunk.new_start <= hi - 1
    return span[0] <= hi and lo <= span[1]


def change_touches_range(change: FileChange, lo: int, hi: int) -> bool:
    return any(hunk_touches_range(h, lo, hi) for h in change.hunks)


def _map_line_to_old(change: FileChange, line: int):
    """Map a new-side line through the change. Returns ("pos", old_line),
    ("inside", hunk) for lines a hunk rewrote, or the line past an insertion
    to skip to (insertions own no old-side lines)."""
    shift = 0
    for h in change.hunks:
        if h.new_len > 0:
            lo = h.new_start
            hi = h.new_start + h.new_len - 1
            if line < lo:
                break
            if line <= hi:
                if h.old_len > 0:
                    return ("inside", h)
                return ("skip_to", hi + 1)
            shift += h.old_len - h.new_len
        else:
            if line <= h.new_start:
                break
            shift += h.old_len
    return ("pos", line + shift)


def map_range_to_old(change: FileChange, lo: int, hi: int) -> tuple[int, int] | None:
    """Map a new-side inclusive range to the change's old side.

    Lines rewritten by a hunk map to the hunk's old-side span; lines born in
    an insertion contribute nothing. Returns None when the whole range was
    inserted by this change.
    """
    start = None
    line = lo
    while line <= hi:
        kind, val = _map_line_to_old(change, line)
        if kind == "pos":
            start = val
            break
        if kind == "inside":
            start = val.old_start
            break
        line = val
    if start is None:
        return None
    line = hi
    end = None
    while line >= lo:
        kind, val = _map_line_to_old(change, line)
        if kind == "pos":
            end = val
            break
        if kind == "inside":
            end = val.old_start + val.old_len - 1
            break
        # line sits in an insertion; step below it
        span_lo = next(
            h.new_start for h in change.hunks
            if h.new_len > 0 and h.new_start <= line <= h.new_start + h.new_len - 1
        )
        line = span_lo - 1
    if end is None or end < start:
        return None
    return start, end
