"""Per-change-part feature extraction.

Every record gets the full catalog: ticket/commit features, file history
features (two-pass: the remark-history ones need tracing output), change
part text patterns, and the two n-gram entropy families. Inapplicable
values are ABSENT, never a fake zero.
"""

from __future__ import annotations

import logging
import re
from bisect import bisect_left, bisect_right
from dataclasses import replace
from datetime import datetime, timezone

from . import naturalness, scopes
from .catalog import FEATURE_NAMES
from .history import HistoryIndex
from .model import ABSENT, ChangePartRecord, Dataset
from .remarks import _is_import_only, _is_whitespace_only

log = logging.getLogger(__name__)

_WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
_CALL_RE = re.compile(r"[A-Za-z_$][\w$]*(?=\s*\()")
_NON_CALL_KEYWORDS = {
    "if", "for", "while", "switch", "catch", "return", "new", "synchronized",
    "assert", "throw", "super", "this", "do", "else", "try", "function",
}
_VISIBILITY_RE = re.compile(r"\b(public|protected|private)\b")
_FINAL_RE = re.compile(r"\bfinal\b")
_NONNLS_RE = re.compile(r"//\s*\$NON-NLS-\d+\$")
_OWNERSHIP_WINDOW = 365 * 86400
_FREQUENT_FILENAME_COUNT = 20


def extension_of(path: str) -> str:
    basename = path.rsplit("/", 1)[-1]
    return basename.rsplit(".", 1)[-1].lower() if "." in basename else ""


def srcdir_of(path: str) -> str:
    segments = path.split("/")[:-1]
    if any(s == "testdata" for s in segments):
        return "testdata"
    if any(s in ("test", "tests") for s in segments):
        return "test"
    if any(s in ("resources", "res") for s in segments):
        return "resources"
    return "src"


def project_of(path: str) -> str:
    return path.split("/", 1)[0]


def _strip_ws(text: str) -> str:
    return "".join(text.split())


def _only_change(old_lines, new_lines, scrub) -> bool:
    old = _strip_ws(scrub("\n".join(old_lines)))
    new = _strip_ws(scrub("\n".join(new_lines)))
    raw_old = _strip_ws("\n".join(old_lines))
    raw_new = _strip_ws("\n".join(new_lines))
    return raw_old != raw_new and old == new


def comment_line_count(lines, file_kind: str) -> int:
    count = 0
    for line in lines:
        stripped = line.strip()
        if not stripped:
            continue
        if file_kind == scopes.BRACE_STRUCTURED:
            if stripped.startswith(("//", "/*", "*", "*/")):
                count += 1
        elif file_kind == scopes.MARKUP:
            if stripped.startswith("<!--") or stripped.endswith("-->"):
                count += 1
        else:
            if stripped.startswith("#"):
                count += 1
    return count


def block_count(lines) -> int:
    return sum(line.count("{") for line in lines)


def response_count(lines) -> int:
    names = {
        m.group(0)
        for line in lines
        for m in _CALL_RE.finditer(line)
        if m.group(0) not in _NON_CALL_KEYWORDS
    }
    return len(names)


def override_annotation(old_lines, new_lines) -> str:
    old = any("@Override" in l for l in old_lines)
    new = any("@Override" in l for l in new_lines)
    return {(False, False): "none", (True, False): "old", (False, True): "new", (True, True): "both"}[
        (old, new)
    ]


class FeatureContext:
    """Precomputed lookups shared by all records of a dataset."""

    def __init__(self, dataset: Dataset, repo_path=None):
        self.dataset = dataset
        self.index = HistoryIndex(dataset)
        self.repo_path = repo_path if repo_path is not None else dataset.repo_path
        self._chain_cache: dict[tuple[str, str], tuple[int, float, int]] = {}

        counts: dict[str, int] = {}
        for rec in dataset.iter_records():
            base = rec.path.rsplit("/", 1)[-1]
            counts[base] = counts.get(base, 0) + 1
        top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        self.frequent_basenames = {name for name, _ in top[:_FREQUENT_FILENAME_COUNT]}

        # commits per project, time-ordered, for the ownership window
        per_project: dict[str, list[tuple[int, str]]] = {}
        for cid in dataset.commit_order:
            commit = dataset.commits[cid]
            for proj in sorted({project_of(fc.path) for fc in commit.file_changes}):
                per_project.setdefault(proj, []).append((commit.timestamp, commit.author))
        self.project_commit_ts = {
            proj: [ts for ts, _ in rows] for proj, rows in per_project.items()
        }
        self.project_commit_authors = {
            proj: [a for _, a in rows] for proj, rows in per_project.items()
        }

        self._remark_events()

    def _remark_events(self):
        """Review-remark history: when did a file / an author-project pair
        last receive a remark. Needs trigger links (two-pass extraction)."""
        per_file: dict[str, list[int]] = {}
        per_project_author: dict[tuple[str, str], list[int]] = {}
        record_by_id = self.dataset.record_by_id()
        for ticket_id in sorted(self.dataset.tickets):
            ticket = self.dataset.tickets[ticket_id]
            remarks = {m.remark_id: m for m in ticket.remarks}
            for link in ticket.trigger_links:
                remark = remarks[link.remark_id]
                ts = self.dataset.commits[remark.review_commit_id].timestamp
                if link.whole_ticket:
                    authors = {
                        self.dataset.commits[cid].author
                        for cid in ticket.timeline.commit_ids_impl
                    }
                else:
                    authors = {
                        self.dataset.commits[record_by_id[rid].commit_id].author
                        for rid in link.triggers
                    }
                files = {path for path, _ in remark.sites}
                for path in files:
                    per_file.setdefault(path, []).append(ts)
                    for author in authors:
                        per_project_author.setdefault(
                            (project_of(path), author), []
                        ).append(ts)
        self.remark_ts_by_file = {k: sorted(v) for k, v in per_file.items()}
        self.remark_ts_by_project_author = {
            k: sorted(v) for k, v in per_project_author.items()
        }

    def chain_stats(self, commit_id: str, path: str) -> tuple[int, float, int]:
        """(commit count, age in days, distinct author count) for the file at
        this commit, following renames back to the file's birth."""
        key = (commit_id, path)
        if key not in self._chain_cache:
            pos = self.index.order[commit_id]
            commit = self.dataset.commits[commit_id]
            authors = {commit.author}
            count = 1
            oldest_ts = commit.timestamp
            for event in self.index.walk_backwards(path, pos):
                count += 1
                authors.add(event.commit.author)
                oldest_ts = event.commit.timestamp
            age_days = (commit.timestamp - oldest_ts) / 86400.0
            self._chain_cache[key] = (count, age_days, len(authors))
        return self._chain_cache[key]

    def ownership(self, project: str, author: str, ts: int) -> float | object:
        ts_list = self.project_commit_ts.get(project, [])
        lo = bisect_right(ts_list, ts - _OWNERSHIP_WINDOW)
        hi = bisect_right(ts_list, ts)
        total = hi - lo
        if total == 0:
            return ABSENT
        by_author = sum(
            1 for a in self.project_commit_authors[project][lo:hi] if a == author
        )
        return by_author / total

    def commits_since_remark_for_author(self, project: str, author: str, ts: int):
        remark_ts = self.remark_ts_by_project_author.get((project, author), [])
        idx = bisect_left(remark_ts, ts) - 1
        if idx < 0:
            return ABSENT
        last = remark_ts[idx]
        ts_list = self.project_commit_ts.get(project, [])
        authors = self.project_commit_authors.get(project, [])
        lo = bisect_right(ts_list, last)
        hi = bisect_left(ts_list, ts)
        return float(sum(1 for a in authors[lo:hi] if a == author))

    def commits_since_remark_in_file(self, path: str, ts: int):
        remark_ts = self.remark_ts_by_file.get(path, [])
        idx = bisect_left(remark_ts, ts) - 1
        if idx < 0:
            return ABSENT
        last = remark_ts[idx]
        events = self.index.by_path.get(path, [])
        return float(
            sum(1 for e in events if last < e.commit.timestamp < ts)
        )


def compute_base_features(record: ChangePartRecord, ctx: FeatureContext) -> dict:
    """All non-entropy catalog features for one change part."""
    dataset = ctx.dataset
    commit = dataset.commits[record.commit_id]
    ticket = dataset.tickets[record.ticket_id]
    fc = next(c for c in commit.file_changes if c.path == record.path)
    moment = datetime.fromtimestamp(commit.timestamp, tz=timezone.utc)
    file_kind = scopes.file_kind_for_path(record.path)
    basename = record.path.rsplit("/", 1)[-1]

    f: dict = {}
    f["issueType"] = ticket.issue_type if ticket.issue_type is not None else ABSENT
    f["author"] = commit.author
    f["authorDay"] = _WEEKDAYS[moment.weekday()]
    f["shiftedAuthorHour"] = float((moment.hour - 6) % 24)
    f["fileCountInCommit"] = float(len(commit.file_changes))
    f["hunkCountInCommit"] = float(
        sum(len(c.hunks) if c.hunks else 1 for c in commit.file_changes)
    )
    f["commitContainsTest"] = any(
        srcdir_of(c.path) == "test" for c in commit.file_changes
    )

    f["binary"] = fc.binary
    f["filetype"] = extension_of(record.path)
    f["srcdir"] = srcdir_of(record.path)
    f["project"] = project_of(record.path)
    f["frequentFilename"] = basename if basename in ctx.frequent_basenames else ABSENT
    commit_count, age_days, author_count = ctx.chain_stats(record.commit_id, record.path)
    f["fileAgeDays"] = age_days
    f["fileCommitCount"] = float(commit_count)
    f["distinctFileAuthorCount"] = float(author_count)
    f["newLineCountInFile"] = (
        float(fc.new_line_count) if fc.new_line_count is not None else ABSENT
    )
    f["recentProjectOwnership"] = ctx.ownership(
        f["project"], commit.author, commit.timestamp
    )
    f["commitsSinceLastRemarkForAuthorInProject"] = ctx.commits_since_remark_for_author(
        f["project"], commit.author, commit.timestamp
    )
    f["commitsSinceLastRemarkInFile"] = ctx.commits_since_remark_in_file(
        record.path, commit.timestamp
    )
    f["hunkCountInFile"] = float(len(fc.hunks) if fc.hunks else 1)
    f["changetype"] = fc.change_type
    f["gitSimilarity"] = float(fc.similarity)
    changed_new = sum(h.new_len for h in fc.hunks)
    f["newShareOfLinesInFile"] = (
        changed_new / fc.new_line_count if fc.new_line_count else ABSENT
    )
    f["isNodeModules"] = "node_modules" in record.path.split("/")

    hunk = record.hunk
    if hunk is None:
        for name in (
            "oldHunkSize", "newHunkSize", "changeInHunkSize",
            "commentLineCountOld", "commentLineCountNew", "changeInCommentLineCount",
            "oldBlockCount", "newBlockCount", "changeInBlockCount",
            "responseForHunkOld", "responseForHunkNew", "changeInResponseForHunk",
            "whitespaceOnly", "packageAndImportOnly", "finalChangeOnly",
            "nonnlsChangeOnly", "visibilityChangeOnly", "overrideAnnotation",
        ):
            f[name] = ABSENT
        return f

    old_lines, new_lines = hunk.old_lines, hunk.new_lines
    f["oldHunkSize"] = float(hunk.old_len)
    f["newHunkSize"] = float(hunk.new_len)
    f["changeInHunkSize"] = float(hunk.new_len - hunk.old_len)
    f["commentLineCountOld"] = float(comment_line_count(old_lines, file_kind))
    f["commentLineCountNew"] = float(comment_line_count(new_lines, file_kind))
    f["changeInCommentLineCount"] = f["commentLineCountNew"] - f["commentLineCountOld"]
    if file_kind == scopes.BRACE_STRUCTURED:
        f["oldBlockCount"] = float(block_count(old_lines))
        f["newBlockCount"] = float(block_count(new_lines))
        f["changeInBlockCount"] = f["newBlockCount"] - f["oldBlockCount"]
        f["responseForHunkOld"] = float(response_count(old_lines))
        f["responseForHunkNew"] = float(response_count(new_lines))
        f["changeInResponseForHunk"] = f["responseForHunkNew"] - f["responseForHunkOld"]
    else:
        for name in (
            "oldBlockCount", "newBlockCount", "changeInBlockCount",
            "responseForHunkOld", "responseForHunkNew", "changeInResponseForHunk",
        ):
            f[name] = ABSENT
    f["whitespaceOnly"] = _is_whitespace_only(old_lines, new_lines)
    f["packageAndImportOnly"] = _is_import_only(old_lines, new_lines)
    f["finalChangeOnly"] = _only_change(old_lines, new_lines, lambda t: _FINAL_RE.sub("", t))
    f["nonnlsChangeOnly"] = _only_change(old_lines, new_lines, lambda t: _NONNLS_RE.sub("", t))
    f["visibilityChangeOnly"] = _only_change(
        old_lines, new_lines, lambda t: _VISIBILITY_RE.sub("", t)
    )
    f["overrideAnnotation"] = override_annotation(old_lines, new_lines)
    return f


class TicketEntropyContext:
    """Entropy models for one ticket: a codebase model per file kind trained
    on the snapshot before the first implementation commit, and one model
    trained incrementally over the ticket's change parts in order."""

    def __init__(self, ticket, ctx: FeatureContext, order: int, interpolation: float):
        self.ticket = ticket
        self.ctx = ctx
        self.order = order
        self.interpolation = interpolation
        self._codebase_models: dict[str, naturalness.NgramModel | None] = {}
        self.review_model = naturalness.NgramModel(order, interpolation)

    def codebase_model(self, file_kind: str):
        if file_kind not in self._codebase_models:
            self._codebase_models[file_kind] = self._train_codebase(file_kind)
        return self._codebase_models[file_kind]

    def _train_codebase(self, file_kind: str):
        snapshot = self.ticket.snapshot_commit
        repo = self.ctx.repo_path
        if snapshot is None or repo is None:
            return naturalness.NgramModel(self.order, self.interpolation)
        from .ingest import _git, _show_blob
        from .model import DataError

        try:
            listing = _git(repo, "ls-tree", "-r", "--name-only", snapshot)
        except DataError as exc:
            log.warning("codebase snapshot unavailable (%s); entropyCb* set ABSENT", exc)
            return None
        model = naturalness.NgramModel(self.order, self.interpolation)
        for path in sorted(listing.splitlines()):
            if scopes.file_kind_for_path(path) != file_kind:
                continue
            blob = _show_blob(repo, snapshot, path)
            if blob is None or b"\x00" in blob[:4096]:
                continue
            tokens = naturalness.tokenize(blob.decode("utf-8", errors="replace"))
            if tokens:
                model.add_sequence(tokens)
        return model

    def score(self, record: ChangePartRecord) -> dict:
        f: dict = {}
        commit = self.ctx.dataset.commits[record.commit_id]
        fc = next(c for c in commit.file_changes if c.path == record.path)
        if record.hunk is None or fc.binary:
            tokens = None
        else:
            tokens = naturalness.tokenize("\n".join(record.hunk.new_lines))

        if tokens is None:
            cb = re_agg = naturalness.ABSENT_AGGREGATE
        else:
            model = self.codebase_model(scopes.file_kind_for_path(record.path))
            if model is None or not tokens:
                cb = naturalness.ABSENT_AGGREGATE
            else:
                cb = naturalness.aggregate(naturalness.token_entropy(model, tokens))
            if tokens:
                re_agg = naturalness.aggregate(
                    naturalness.token_entropy(self.review_model, tokens)
                )
                self.review_model.add_sequence(tokens)
            else:
                re_agg = naturalness.ABSENT_AGGREGATE

        for prefix, agg in (("entropyCb", cb), ("entropyRe", re_agg)):
            f[f"{prefix}Max"] = agg.max
            f[f"{prefix}UppQuar"] = agg.upp_quar
            f[f"{prefix}Med"] = agg.med
            f[f"{prefix}Sum"] = agg.sum
            f[f"{prefix}Avg"] = agg.avg
        return f


def entropy_order_key(ctx: FeatureContext):
    order = ctx.index.order

    def key(record: ChangePartRecord):
        commit = ctx.dataset.commits[record.commit_id]
        return (commit.timestamp, order[record.commit_id], record.path, record.hunk_index)

    return key


def extract_features(
    dataset: Dataset,
    ngram_order: int = 3,
    interpolation: float = 0.5,
    repo_path=None,
) -> Dataset:
    """Compute the full catalog for every record, in place."""
    ctx = FeatureContext(dataset, repo_path=repo_path)
    for ticket_id in sorted(dataset.tickets):
        ticket = dataset.tickets[ticket_id]
        entropy_ctx = TicketEntropyContext(ticket, ctx, ngram_order, interpolation)
        features_by_id: dict[str, dict] = {}
        for record in sorted(ticket.records, key=entropy_order_key(ctx)):
            f = compute_base_features(record, ctx)
            f.update(entropy_ctx.score(record))
            ordered = {name: f[name] for name in FEATURE_NAMES}
            if len(ordered) != len(f):
                raise AssertionError("feature computation produced off-catalog names")
            features_by_id[record.record_id] = ordered
        ticket.records = [
            replace(record, features=features_by_id[record.record_id])
            for record in ticket.records
        ]
    dataset.ngram_order = ngram_order
    dataset.ngram_lambda = interpolation
    return dataset
