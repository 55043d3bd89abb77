"""Trace review remarks back to the change parts that triggered them.

Each remark line gets a line-range scope in the file version just before the
review commit. The tracer walks the file's history backwards: changes inside
the scope that belong to implementation commits of the same ticket become
triggers (and the walk continues for more), changes by other tickets or
review commits are skipped. When a scope finds nothing, it is widened
(block, method, class, file); an exhausted chain falls back to the whole
ticket as potential trigger.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import scopes
from .history import (
    HistoryIndex,
    change_touches_range,
    hunk_touches_range,
    map_range_to_old,
)
from .model import Dataset, Remark, TicketData, TriggerLink

AT_LEAST_ONE_TRIGGER_FOUND = "AT_LEAST_ONE_TRIGGER_FOUND"
NO_TRIGGER_FOUND = "NO_TRIGGER_FOUND"


@dataclass
class TraceOutcome:
    links: list[TriggerLink] = field(default_factory=list)
    statistics: dict[str, int] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)


class TicketHistory:
    """Read-only view a trace needs: the global file history plus the
    ticket's implementation-commit record ids."""

    def __init__(self, index: HistoryIndex, ticket: TicketData):
        self.index = index
        self.ticket_id = ticket.ticket_id
        self._impl_ids = set(ticket.timeline.commit_ids_impl)
        self.records_by_site: dict[tuple[str, str], list] = {}
        self.record_by_hunk: dict[tuple[str, str, int], str] = {}
        for rec in ticket.records:
            self.records_by_site.setdefault((rec.commit_id, rec.path), []).append(rec)
            self.record_by_hunk[(rec.commit_id, rec.path, rec.hunk_index)] = rec.record_id

    def is_implementation_commit(self, commit_id: str) -> bool:
        return commit_id in self._impl_ids


def trace_with_scope(scope: scopes.Scope, ticket_history: TicketHistory):
    """Walk backwards from scope.at_commit; returns (outcome, trigger ids).

    Triggers accumulate across the whole walk: finding one does not stop the
    search, earlier changes in the same scope are collected too.
    """
    if scope.variant == scopes.WHOLE_TICKET:
        raise ValueError("whole-ticket scope cannot be traced")
    index = ticket_history.index
    pos = index.order[scope.at_commit]
    triggers: set[str] = set()
    line_range = scope.line_range if scope.variant != scopes.FILE else None

    for event in index.walk_backwards(scope.file, pos):
        fc = event.change
        cid = event.commit.commit_id
        if line_range is None:
            if ticket_history.is_implementation_commit(cid):
                for rec in ticket_history.records_by_site.get((cid, fc.path), []):
                    triggers.add(rec.record_id)
        else:
            lo, hi = line_range
            if change_touches_range(fc, lo, hi) and ticket_history.is_implementation_commit(cid):
                for i, h in enumerate(fc.hunks):
                    if hunk_touches_range(h, lo, hi):
                        rid = ticket_history.record_by_hunk.get((cid, fc.path, i))
                        if rid is not None:
                            triggers.add(rid)
            mapped = map_range_to_old(fc, lo, hi)
            if mapped is None:
                break  # the whole range was born in this change
            line_range = mapped
    if triggers:
        return AT_LEAST_ONE_TRIGGER_FOUND, triggers
    return NO_TRIGGER_FOUND, triggers


def _trace_chain(scope: scopes.Scope, tree: scopes.ScopeTree, ticket_history: TicketHistory):
    """Trace one scope, expanding on failure. Returns (trigger ids or None,
    scope variant reached); None means the chain exhausted (whole ticket)."""
    current = scope
    while current is not None:
        outcome, triggers = trace_with_scope(current, ticket_history)
        if outcome == AT_LEAST_ONE_TRIGGER_FOUND:
            return triggers, current.variant
        current = scopes.expand(current, tree)
    return None, scopes.WHOLE_TICKET


_PLAIN_TREE = scopes.ScopeTree(scopes.PLAIN, scopes.ScopeNode("FILE", (1, 0)))


def trace_remark(remark: Remark, dataset: Dataset, ticket_history: TicketHistory) -> TriggerLink:
    commit = dataset.commits[remark.review_commit_id]
    changes_by_path = {fc.path: fc for fc in commit.file_changes}
    triggers: set[str] = set()
    whole_ticket = False
    reached = scopes.LINE_RANGE
    trees: dict[str, scopes.ScopeTree] = {}

    def tree_for(fc):
        if fc.path not in trees:
            kind = scopes.file_kind_for_path(fc.path)
            if fc.old_content is None:
                trees[fc.path] = _PLAIN_TREE
            else:
                trees[fc.path] = scopes.build_scope_tree(fc.old_content, kind)
        return trees[fc.path]

    for path, hunk_index in remark.sites:
        fc = changes_by_path[path]
        if fc.change_type == "ADD":
            # a whole new file appearing during review has no history to trace
            whole_ticket = True
            reached = scopes.WHOLE_TICKET
            continue
        # history before the review commit lives under the old-side name
        walk_path = fc.path_old
        forced_file_scope = fc.change_type == "DELETE" or fc.binary or not fc.hunks
        if forced_file_scope:
            chains = [
                (
                    scopes.Scope(scopes.FILE, file=walk_path, at_commit=commit.commit_id),
                    _PLAIN_TREE,
                )
            ]
        else:
            hunk = fc.hunks[hunk_index]
            tree = tree_for(fc)
            old_line_count = tree.root.line_range[1]
            lines = _scope_lines(hunk, old_line_count)
            if not lines:
                chains = [
                    (
                        scopes.Scope(scopes.FILE, file=walk_path, at_commit=commit.commit_id),
                        tree,
                    )
                ]
            else:
                chains = [
                    (
                        scopes.Scope(
                            scopes.LINE_RANGE,
                            file=walk_path,
                            line_range=(line, line),
                            at_commit=commit.commit_id,
                        ),
                        tree,
                    )
                    for line in lines
                ]
        for scope, tree in chains:
            found, variant = _trace_chain(scope, tree, ticket_history)
            reached = max(reached, variant, key=scopes.SCOPE_ORDER.get)
            if found is None:
                whole_ticket = True
            else:
                triggers.update(found)

    if whole_ticket:
        # the whole-ticket marker subsumes any concrete triggers found at
        # other sites of the same merged remark
        return TriggerLink(
            remark_id=remark.remark_id,
            whole_ticket=True,
            found_at_scope=scopes.WHOLE_TICKET,
        )
    return TriggerLink(
        remark_id=remark.remark_id,
        triggers=frozenset(triggers),
        found_at_scope=reached,
    )


def _scope_lines(hunk, old_line_count: int) -> list[int]:
    """Old-side lines to seed line scopes with. Pure insertions trace the
    two adjacent surviving lines instead."""
    if hunk.old_len > 0:
        return list(range(hunk.old_start, hunk.old_start + hunk.old_len))
    adjacent = [hunk.old_start, hunk.old_start + 1]
    return [l for l in adjacent if 1 <= l <= old_line_count]


def trace_ticket(ticket: TicketData, dataset: Dataset, index: HistoryIndex) -> TraceOutcome:
    outcome = TraceOutcome()
    ticket_history = TicketHistory(index, ticket)
    for remark in sorted(ticket.remarks, key=lambda m: m.remark_id):
        try:
            link = trace_remark(remark, dataset, ticket_history)
        except Exception as exc:  # keep tracing the other remarks
            outcome.errors.append(f"{remark.remark_id}: {exc}")
            continue
        outcome.links.append(link)
        outcome.statistics[link.found_at_scope] = (
            outcome.statistics.get(link.found_at_scope, 0) + 1
        )
    return outcome


def trace_dataset(dataset: Dataset) -> dict[str, TraceOutcome]:
    """Trace every ticket; stores trigger links on the dataset in place."""
    index = HistoryIndex(dataset)
    outcomes = {}
    for ticket_id in sorted(dataset.tickets):
        ticket = dataset.tickets[ticket_id]
        outcome = trace_ticket(ticket, dataset, index)
        ticket.trigger_links = outcome.links
        outcomes[ticket_id] = outcome
    return outcomes
