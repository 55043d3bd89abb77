"""The seven-objective evaluation of rulesets, cost family, and baselines.

A remark counts as missed only when every one of its potential triggers is
skipped (or-semantics); a whole-ticket remark is missed when every record of
its ticket is skipped. The evaluator works on columnar numpy views with
memoized per-condition match masks, so local search stays cheap.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, fields

import numpy as np

from .catalog import FEATURE_NAMES, is_numeric
from .model import ABSENT, DataError, Dataset
from .rules import RuleSet

MINIMIZED = ("complexity", "feature_count", "missed_remark_count", "missed_remark_log")
MAXIMIZED = ("saved_record_count", "saved_records_trimmed_mean", "saved_java_loc")
OBJECTIVE_NAMES = MINIMIZED + MAXIMIZED


@dataclass(frozen=True)
class ObjectiveVector:
    complexity: float
    feature_count: float
    missed_remark_count: float
    missed_remark_log: float
    saved_record_count: float
    saved_records_trimmed_mean: float
    saved_java_loc: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, name) for name in OBJECTIVE_NAMES)


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """True when `a` is no worse in every objective and better in one."""
    strict = False
    for name in MINIMIZED:
        va, vb = getattr(a, name), getattr(b, name)
        if va > vb:
            return False
        strict = strict or va < vb
    for name in MAXIMIZED:
        va, vb = getattr(a, name), getattr(b, name)
        if va < vb:
            return False
        strict = strict or va > vb
    return strict


def trimmed_mean(values, trim_fraction: float = 0.2) -> float:
    """Mean after dropping floor(trim_fraction * n) values from each tail."""
    if not values:
        return 0.0
    ordered = sorted(values)
    g = int(math.floor(trim_fraction * len(ordered)))
    kept = ordered[g : len(ordered) - g] if g else ordered
    return sum(kept) / len(kept)


class EvaluationIndex:
    """Columnar view of a traced, featured dataset."""

    def __init__(self, dataset: Dataset, java_extension: str = "java"):
        self.dataset = dataset
        self.java_extension = java_extension
        self.records = list(dataset.iter_records())
        if any(r.features is None for r in self.records):
            raise DataError("dataset has records without features; run feature extraction first")
        self.record_ids = [r.record_id for r in self.records]
        self.record_pos = {rid: i for i, rid in enumerate(self.record_ids)}
        n = len(self.records)

        self.numeric_columns: dict[str, np.ndarray] = {}
        self.other_columns: dict[str, list] = {}
        for name in FEATURE_NAMES:
            if is_numeric(name):
                col = np.full(n, np.nan)
                for i, rec in enumerate(self.records):
                    v = rec.features.get(name, ABSENT)
                    if v is not ABSENT:
                        col[i] = float(v)
                self.numeric_columns[name] = col
            else:
                self.other_columns[name] = [
                    rec.features.get(name, ABSENT) for rec in self.records
                ]

        suffix = "." + java_extension
        self.java_mask = np.array(
            [r.path.endswith(suffix) for r in self.records], dtype=bool
        )
        self.loc = np.array(
            [
                (r.hunk.new_len or r.hunk.old_len) if r.hunk is not None else 0
                for r in self.records
            ],
            dtype=float,
        )

        self.ticket_ids = sorted(dataset.tickets)
        self.ticket_count = len(self.ticket_ids)
        self.ticket_indices = {
            tid: np.array(
                [self.record_pos[r.record_id] for r in dataset.tickets[tid].records],
                dtype=int,
            )
            for tid in self.ticket_ids
        }

        # remark rows in deterministic order: (weight, trigger index array)
        self.remark_rows: list[tuple[str, str, float, np.ndarray]] = []
        for tid in self.ticket_ids:
            ticket = dataset.tickets[tid]
            n_remarks = len(ticket.remarks)
            weight = math.log(1 + n_remarks)
            for link in sorted(ticket.trigger_links, key=lambda l: l.remark_id):
                if link.whole_ticket:
                    idx = self.ticket_indices[tid]
                else:
                    idx = np.array(
                        sorted(self.record_pos[rid] for rid in link.triggers), dtype=int
                    )
                self.remark_rows.append((tid, link.remark_id, weight, idx))

        self._mask_cache: dict = {}

    def condition_mask(self, condition) -> np.ndarray:
        key = (condition.feature, condition.operator, condition.literal)
        cached = self._mask_cache.get(key)
        if cached is not None:
            return cached
        if is_numeric(condition.feature):
            col = self.numeric_columns[condition.feature]
            with np.errstate(invalid="ignore"):
                mask = col <= condition.literal if condition.operator == "<=" else col >= condition.literal
        else:
            values = self.other_columns[condition.feature]
            lit = condition.literal
            hits = []
            for v in values:
                if v is ABSENT:
                    hits.append(False)
                    continue
                if isinstance(v, bool):
                    v = "true" if v else "false"
                hits.append((v == lit) == (condition.operator == "=="))
            mask = np.array(hits, dtype=bool)
        self._mask_cache[key] = mask
        return mask

    def skip_mask(self, ruleset: RuleSet) -> np.ndarray:
        n = len(self.records)
        incl = np.zeros(n, dtype=bool)
        for rule in ruleset.incl:
            rule_mask = np.ones(n, dtype=bool)
            for cond in rule.conditions:
                rule_mask &= self.condition_mask(cond)
            incl |= rule_mask
        if not ruleset.excl:
            return incl
        excl = np.zeros(n, dtype=bool)
        for rule in ruleset.excl:
            rule_mask = np.ones(n, dtype=bool)
            for cond in rule.conditions:
                rule_mask &= self.condition_mask(cond)
            excl |= rule_mask
        return incl & ~excl

    def evaluate_mask(self, mask: np.ndarray, complexity=0, feature_count=0) -> ObjectiveVector:
        missed_count = 0
        missed_log = 0.0
        for _, _, weight, idx in self.remark_rows:
            if bool(np.all(mask[idx])):
                missed_count += 1
                missed_log += weight
        per_ticket = [
            int(mask[self.ticket_indices[tid]].sum()) for tid in self.ticket_ids
        ]
        return ObjectiveVector(
            complexity=float(complexity),
            feature_count=float(feature_count),
            missed_remark_count=float(missed_count),
            missed_remark_log=missed_log,
            saved_record_count=float(mask.sum()),
            saved_records_trimmed_mean=trimmed_mean(per_ticket),
            saved_java_loc=float(self.loc[mask & self.java_mask].sum()),
        )

    def evaluate(self, ruleset: RuleSet) -> ObjectiveVector:
        mask = self.skip_mask(ruleset)
        return self.evaluate_mask(
            mask,
            complexity=ruleset.complexity,
            feature_count=len(ruleset.features_used()),
        )


def evaluate(ruleset: RuleSet, dataset: Dataset, java_extension: str = "java") -> ObjectiveVector:
    return EvaluationIndex(dataset, java_extension).evaluate(ruleset)


def cost(vector: ObjectiveVector, cost_factor: float, ticket_count: int) -> float:
    """Per-ticket cost of using the ruleset; profit is its negation."""
    if ticket_count < 1:
        raise ValueError("cost needs at least one ticket")
    return (
        vector.missed_remark_log / ticket_count
    ) * cost_factor - vector.saved_records_trimmed_mean


def break_even(vector: ObjectiveVector, ticket_count: int) -> dict:
    """Cost factors at which profit crosses zero (infinite when nothing is missed)."""
    r = vector.missed_remark_log
    if r == 0:
        return {"per_record": math.inf, "per_loc": math.inf}
    return {
        "per_record": vector.saved_records_trimmed_mean * ticket_count / r,
        "per_loc": vector.saved_java_loc / r,
    }


def baseline_random(
    index: EvaluationIndex, share: float, n_seeds: int = 100, base_seed: int = 0
) -> ObjectiveVector:
    """Skip floor(share * n) records per ticket uniformly; average objectives
    over the seeds."""
    if not 0 <= share <= 1:
        raise ValueError("share must be within [0, 1]")
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    totals = np.zeros(len(OBJECTIVE_NAMES))
    n = len(index.records)
    for s in range(n_seeds):
        rng = random.Random(base_seed + s)
        mask = np.zeros(n, dtype=bool)
        for tid in index.ticket_ids:
            idx = index.ticket_indices[tid]
            k = int(math.floor(share * len(idx)))
            if k:
                chosen = rng.sample(sorted(idx.tolist()), k)
                mask[np.array(chosen, dtype=int)] = True
        totals += np.array(index.evaluate_mask(mask).as_tuple())
    avg = totals / n_seeds
    return ObjectiveVector(*avg.tolist())


def linked_record_ids(dataset: Dataset) -> set[str]:
    """Records that are a potential trigger of at least one remark."""
    linked: set[str] = set()
    for tid in sorted(dataset.tickets):
        ticket = dataset.tickets[tid]
        for link in ticket.trigger_links:
            if link.whole_ticket:
                linked.update(r.record_id for r in ticket.records)
            else:
                linked.update(link.triggers)
    return linked


def export_labels(dataset: Dataset, path) -> int:
    """Conservative labels for external single-label rule learners."""
    linked = linked_record_ids(dataset)
    rows = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_NONNUMERIC)
        writer.writerow(["record_id", "ticket_id", *FEATURE_NAMES, "label"])
        for rec in dataset.iter_records():
            if rec.features is None:
                raise DataError("dataset has records without features; run feature extraction first")
            values = []
            for name in FEATURE_NAMES:
                v = rec.features.get(name, ABSENT)
                if v is ABSENT:
                    values.append("")
                elif isinstance(v, bool):
                    values.append("true" if v else "false")
                else:
                    values.append(v)
            label = "must_review" if rec.record_id in linked else "no_trigger"
            writer.writerow([rec.record_id, rec.ticket_id, *values, label])
            rows += 1
    return rows
