"""Interactive multi-objective ruleset mining (GRASP with path relinking).

Each iteration: a randomized greedy set cover picks which potential triggers
must stay reviewed, separate-and-conquer induction grows a candidate ruleset
over those labels, local search perturbs it, and path relinking recombines it
with an archived ruleset. Every evaluated candidate is offered to a Pareto
archive. Feedback commands steer future iterations and are applied at
iteration boundaries, so a run is a pure function of (dataset, seed,
feedback transcript).
"""

from __future__ import annotations

import random
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .catalog import BOOLEAN, CATEGORICAL, FEATURE_KINDS, NUMERIC
from .model import ABSENT, DataError, Dataset
from .objectives import EvaluationIndex, ObjectiveVector, cost, dominates
from .remarks import clean_dataset
from .rules import EQ, GEQ, LEQ, NEQ, Condition, Rule, RuleSet, make_rule, make_ruleset

REJECT_RULE = "REJECT_RULE"
PIN_RULE = "PIN_RULE"
BLACKLIST_FEATURE = "BLACKLIST_FEATURE"
EXCLUDE_TICKET = "EXCLUDE_TICKET"
SET_FOCUS = "SET_FOCUS"
PURGE_ARCHIVE = "PURGE_ARCHIVE"


@dataclass(frozen=True)
class FeedbackCommand:
    kind: str
    rule: Rule | None = None
    feature: str | None = None
    ticket: str | None = None
    weights: tuple[tuple[str, float], ...] | None = None
    predicate: tuple[str, str, float] | None = None  # (objective, op, value)
    command_id: str | None = None


@dataclass
class MiningConfig:
    seed: int = 0
    rcl_alpha: float = 0.8
    max_conditions_per_rule: int = 4
    local_search_budget: int = 8
    add_condition_samples: int = 8
    cost_factor: float = 1000.0
    java_extension: str = "java"


@dataclass(frozen=True)
class ArchiveEntry:
    rid: str
    vector: ObjectiveVector
    ruleset: RuleSet


class ParetoArchive:
    """Mutually nondominated (vector, ruleset) pairs in insertion order."""

    def __init__(self):
        self.entries: list[ArchiveEntry] = []
        self._counter = 0

    def add(self, vector: ObjectiveVector, ruleset: RuleSet) -> bool:
        key = ruleset.key()
        for entry in self.entries:
            if dominates(entry.vector, vector):
                return False
            if entry.vector == vector and entry.ruleset.key() == key:
                return False
        self.entries = [e for e in self.entries if not dominates(vector, e.vector)]
        self._counter += 1
        self.entries.append(ArchiveEntry(f"rs-{self._counter}", vector, ruleset))
        return True

    def snapshot(self) -> tuple[ArchiveEntry, ...]:
        return tuple(self.entries)


def archive_add(archive: ParetoArchive, vector: ObjectiveVector, ruleset: RuleSet) -> bool:
    return archive.add(vector, ruleset)


def candidate_conditions(index: EvaluationIndex) -> list[Condition]:
    """All conditions the induction may draw from: equality (and negation) on
    observed categories, threshold conditions at midpoints between adjacent
    observed numeric values."""
    out: list[Condition] = []
    for feature in sorted(FEATURE_KINDS):
        kind = FEATURE_KINDS[feature]
        if kind == NUMERIC:
            for m in feature_midpoints(index, feature):
                out.append(Condition(feature, LEQ, m))
                out.append(Condition(feature, GEQ, m))
        elif kind == BOOLEAN:
            out.append(Condition(feature, EQ, "true"))
            out.append(Condition(feature, EQ, "false"))
        else:
            values = sorted(
                {v for v in index.other_columns[feature] if v is not ABSENT}
            )
            for v in values:
                out.append(Condition(feature, EQ, v))
                out.append(Condition(feature, NEQ, v))
    return out


def feature_midpoints(index: EvaluationIndex, feature: str) -> list[float]:
    col = index.numeric_columns[feature]
    values = np.unique(col[~np.isnan(col)])
    return [float((a + b) / 2) for a, b in zip(values, values[1:])]


def greedy_set_cover(index: EvaluationIndex, rng: random.Random, alpha: float) -> np.ndarray:
    """Label records TRIGGER/NO_TRIGGER so every remark keeps one reviewed
    trigger. Sole triggers are forced; otherwise records enter a restricted
    candidate list by uncovered-remark coverage and are picked uniformly."""
    n = len(index.records)
    selected = np.zeros(n, dtype=bool)
    rows = [idx for _, _, _, idx in index.remark_rows if len(idx) > 0]
    for idx in rows:
        if len(idx) == 1:
            selected[idx[0]] = True
    covered = [bool(selected[idx].any()) for idx in rows]
    while not all(covered):
        coverage = np.zeros(n, dtype=int)
        for i, idx in enumerate(rows):
            if not covered[i]:
                coverage[idx] += 1
        best = int(coverage.max())
        if best == 0:
            break
        rcl = np.flatnonzero(coverage >= alpha * best)
        pick = int(rcl[rng.randrange(len(rcl))])
        selected[pick] = True
        covered = [c or bool(selected[idx].any()) for c, idx in zip(covered, rows)]
    return selected


def _grow_rule(
    index: EvaluationIndex,
    candidates: list[Condition],
    active: np.ndarray,
    keep: np.ndarray,
    rng: random.Random,
    alpha: float,
    max_conditions: int,
):
    """Grow one conjunction that covers records outside `keep` with rising
    precision. Returns (conditions, covered mask)."""
    covered = active.copy()
    conditions: list[Condition] = []
    while covered.any():
        target_cov = covered & ~keep
        if not (covered & keep).any():
            break
        if len(conditions) >= max_conditions:
            break
        current_precision = target_cov.sum() / covered.sum()
        scored = []
        for cond in candidates:
            mask = index.condition_mask(cond)
            new_cov = covered & mask
            n_target = int((new_cov & ~keep).sum())
            if n_target == 0:
                continue
            n_keep = int(new_cov.sum()) - n_target
            precision = n_target / (n_target + n_keep)
            if precision <= current_precision:
                continue
            scored.append((precision, n_target, cond))
        if not scored:
            break
        best_precision = max(p for p, _, _ in scored)
        rcl = [row for row in scored if row[0] >= alpha * best_precision]
        best_coverage = max(c for _, c, _ in rcl)
        finalists = sorted(
            (cond for p, c, cond in rcl if c == best_coverage),
            key=lambda c: (c.feature, c.operator, str(c.literal)),
        )
        pick = finalists[rng.randrange(len(finalists))]
        conditions.append(pick)
        covered &= index.condition_mask(pick)
    return conditions, covered


def induce_ruleset(
    index: EvaluationIndex,
    labels: np.ndarray,
    rng: random.Random,
    config: MiningConfig,
    candidates: list[Condition] | None = None,
    blacklisted: set[str] | None = None,
) -> RuleSet:
    """Separate-and-conquer: grow one full-precision rule over the records
    labeled NO_TRIGGER, remove what it covers, repeat."""
    if candidates is None:
        candidates = candidate_conditions(index)
    if blacklisted:
        candidates = [c for c in candidates if c.feature not in blacklisted]
    remaining = np.ones(len(index.records), dtype=bool)
    incl: list[Rule] = []
    while (remaining & ~labels).any():
        conditions, covered = _grow_rule(
            index, candidates, remaining, labels, rng,
            config.rcl_alpha, config.max_conditions_per_rule,
        )
        if not conditions:
            break
        if (covered & labels).any() or not (covered & ~labels).any():
            break  # no full-precision rule exists on the remaining data
        incl.append(make_rule(conditions))
        remaining &= ~covered
    return make_ruleset(incl)


def grow_exclusion_rules(
    index: EvaluationIndex,
    ruleset: RuleSet,
    labels: np.ndarray,
    rng: random.Random,
    config: MiningConfig,
    candidates: list[Condition],
) -> RuleSet:
    """When inclusion rules skip records labeled TRIGGER, grow unless-rules
    that carve the false positives back out."""
    excl = list(ruleset.excl)
    for _ in range(8):
        mask = index.skip_mask(make_ruleset(ruleset.incl, excl))
        false_positives = mask & labels
        if not false_positives.any():
            break
        conditions, covered = _grow_rule(
            index, candidates, mask, ~labels, rng,
            config.rcl_alpha, config.max_conditions_per_rule,
        )
        if not conditions or (covered & ~labels).any() or not (covered & labels).any():
            break
        excl.append(make_rule(conditions))
    return make_ruleset(ruleset.incl, excl)


class MiningEngine:
    def __init__(self, dataset: Dataset, config: MiningConfig):
        self.dataset = dataset
        self.config = config
        self.rng = random.Random(config.seed)
        self.archive = ParetoArchive()
        self.generation = 0
        self.pinned: list[Rule] = []
        self.rejected: set[Rule] = set()
        self.blacklisted: set[str] = set()
        self.focus: dict[str, float] | None = None
        self.transcript: list[tuple[int, FeedbackCommand]] = []
        self._queue: list[FeedbackCommand] = []
        self._seen_command_ids: set[str] = set()
        self._rebuild_index()

    def _rebuild_index(self):
        self.index = EvaluationIndex(self.dataset, self.config.java_extension)
        self.candidates = candidate_conditions(self.index)
        self._midpoints = {
            f: feature_midpoints(self.index, f)
            for f in sorted(FEATURE_KINDS)
            if FEATURE_KINDS[f] == NUMERIC
        }

    # -- scalarization ----------------------------------------------------

    def scalar(self, vector: ObjectiveVector) -> float:
        if self.focus is None:
            return cost(vector, self.config.cost_factor, max(self.index.ticket_count, 1))
        total = 0.0
        values = vector.as_dict()
        from .objectives import MAXIMIZED

        for name, weight in self.focus.items():
            v = values[name]
            total += -weight * v if name in MAXIMIZED else weight * v
        return total

    # -- candidate plumbing ------------------------------------------------

    def sanitize(self, ruleset: RuleSet) -> RuleSet:
        incl = [
            r
            for r in ruleset.incl
            if r not in self.rejected and not (r.features_used() & self.blacklisted)
        ]
        for rule in self.pinned:
            if rule not in incl:
                incl.append(rule)
        excl = [
            r
            for r in ruleset.excl
            if r not in self.rejected and not (r.features_used() & self.blacklisted)
        ]
        return make_ruleset(incl, excl)

    def evaluate_and_archive(self, ruleset: RuleSet):
        vector = self.index.evaluate(ruleset)
        self.archive.add(vector, ruleset)
        return vector

    # -- search moves -------------------------------------------------------

    def _neighbors(self, ruleset: RuleSet):
        out = []
        for section in ("incl", "excl"):
            rules = getattr(ruleset, section)
            for i, rule in enumerate(rules):
                reduced = rules[:i] + rules[i + 1 :]
                out.append(self._with_section(ruleset, section, reduced))
                if len(rule.conditions) > 1:
                    for j in range(len(rule.conditions)):
                        conds = rule.conditions[:j] + rule.conditions[j + 1 :]
                        out.append(
                            self._with_section(
                                ruleset, section, rules[:i] + (make_rule(conds),) + rules[i + 1 :]
                            )
                        )
                for j, cond in enumerate(rule.conditions):
                    if cond.operator not in (LEQ, GEQ):
                        continue
                    for moved in self._adjacent_thresholds(cond):
                        conds = rule.conditions[:j] + (moved,) + rule.conditions[j + 1 :]
                        out.append(
                            self._with_section(
                                ruleset, section, rules[:i] + (make_rule(conds),) + rules[i + 1 :]
                            )
                        )
        pool = [c for c in self.candidates if c.feature not in self.blacklisted]
        if pool and ruleset.incl:
            for _ in range(self.config.add_condition_samples):
                cond = pool[self.rng.randrange(len(pool))]
                i = self.rng.randrange(len(ruleset.incl))
                rule = ruleset.incl[i]
                if cond in rule.conditions:
                    continue
                grown = make_rule(rule.conditions + (cond,))
                out.append(
                    self._with_section(
                        ruleset, "incl", ruleset.incl[:i] + (grown,) + ruleset.incl[i + 1 :]
                    )
                )
        return out

    @staticmethod
    def _with_section(ruleset: RuleSet, section: str, rules) -> RuleSet:
        if section == "incl":
            return make_ruleset(rules, ruleset.excl)
        return make_ruleset(ruleset.incl, rules)

    def _adjacent_thresholds(self, cond: Condition):
        midpoints = self._midpoints.get(cond.feature, [])
        if not midpoints:
            return
        pos = bisect_left(midpoints, cond.literal)
        for neighbor in (pos - 1, pos + 1):
            if 0 <= neighbor < len(midpoints) and midpoints[neighbor] != cond.literal:
                yield Condition(cond.feature, cond.operator, midpoints[neighbor])

    def local_search(self, candidate: RuleSet) -> tuple[set, RuleSet]:
        """Scalarized hill climb; every evaluated neighbor goes to the archive."""
        current = candidate
        current_score = self.scalar(self.index.evaluate(current))
        visited = {candidate}
        for _ in range(self.config.local_search_budget):
            best = None
            for neighbor in self._neighbors(current):
                neighbor = self.sanitize(neighbor)
                if neighbor.key() == current.key():
                    continue
                vector = self.evaluate_and_archive(neighbor)
                visited.add(neighbor)
                score = self.scalar(vector)
                if best is None or score < best[0]:
                    best = (score, neighbor)
            if best is None or best[0] >= current_score:
                break
            current_score, current = best
        return visited, current

    def path_relink(self, a: RuleSet, b: RuleSet) -> set:
        """Walk from `a` to `b` by removing rules only in `a` and adding rules
        only in `b`, evaluating every intermediate along the way."""
        visited: set = set()
        current = a
        moves: list[tuple[str, str, Rule]] = []
        for section in ("incl", "excl"):
            own = set(getattr(a, section))
            other = set(getattr(b, section))
            moves += [("remove", section, r) for r in sorted(own - other, key=str)]
            moves += [("add", section, r) for r in sorted(other - own, key=str)]
        while moves:
            options = []
            for move in moves:
                action, section, rule = move
                rules = list(getattr(current, section))
                if action == "remove":
                    rules = [r for r in rules if r != rule]
                else:
                    rules = rules + [rule]
                candidate = self.sanitize(self._with_section(current, section, tuple(rules)))
                vector = self.evaluate_and_archive(candidate)
                visited.add(candidate)
                options.append((self.scalar(vector), move, candidate))
            options.sort(key=lambda o: (o[0], str(o[1])))
            _, chosen_move, current = options[0]
            moves.remove(chosen_move)
        return visited

    # -- feedback -----------------------------------------------------------

    def queue_feedback(self, command: FeedbackCommand):
        self._queue.append(command)

    def apply_feedback(self, command: FeedbackCommand):
        if command.command_id is not None:
            if command.command_id in self._seen_command_ids:
                return
            self._seen_command_ids.add(command.command_id)
        if command.kind == REJECT_RULE:
            if command.rule in self.pinned:
                raise DataError("cannot reject a pinned rule")
            self.rejected.add(command.rule)
            self._purge(lambda e: command.rule in e.ruleset.incl + e.ruleset.excl)
        elif command.kind == PIN_RULE:
            if command.rule in self.rejected:
                raise DataError("cannot pin a rejected rule")
            if command.rule not in self.pinned:
                self.pinned.append(command.rule)
        elif command.kind == BLACKLIST_FEATURE:
            if any(command.feature in r.features_used() for r in self.pinned):
                raise DataError(
                    f"feature {command.feature!r} is used by a pinned rule"
                )
            self.blacklisted.add(command.feature)
            self._purge(lambda e: command.feature in e.ruleset.features_used())
        elif command.kind == EXCLUDE_TICKET:
            clean_dataset(self.dataset, [(command.ticket, "feedback exclusion")])
            self._rebuild_index()
            self._reevaluate_archive()
        elif command.kind == SET_FOCUS:
            weights = dict(command.weights or ())
            from .objectives import OBJECTIVE_NAMES

            unknown = set(weights) - set(OBJECTIVE_NAMES)
            if unknown:
                raise DataError(f"unknown objectives in focus: {sorted(unknown)}")
            self.focus = weights or None
        elif command.kind == PURGE_ARCHIVE:
            objective, op, value = command.predicate
            if op not in ("<=", ">="):
                raise DataError(f"unsupported purge operator {op!r}")

            def matches(entry):
                v = entry.vector.as_dict()[objective]
                return v <= value if op == "<=" else v >= value

            self._purge(matches)
        else:
            raise DataError(f"unknown feedback command {command.kind!r}")
        self.transcript.append((self.generation, command))

    def _purge(self, predicate):
        self.archive.entries = [e for e in self.archive.entries if not predicate(e)]

    def _reevaluate_archive(self):
        old = self.archive.entries
        self.archive = ParetoArchive()
        for entry in old:
            self.archive.add(self.index.evaluate(entry.ruleset), entry.ruleset)

    # -- main loop ------------------------------------------------------------

    def iterate(self):
        while self._queue:
            self.apply_feedback(self._queue.pop(0))
        labels = greedy_set_cover(self.index, self.rng, self.config.rcl_alpha)
        ruleset = induce_ruleset(
            self.index, labels, self.rng, self.config,
            candidates=self.candidates, blacklisted=self.blacklisted,
        )
        ruleset = self.sanitize(ruleset)
        ruleset = grow_exclusion_rules(
            self.index, ruleset, labels, self.rng, self.config,
            [c for c in self.candidates if c.feature not in self.blacklisted],
        )
        self.evaluate_and_archive(ruleset)
        _, improved = self.local_search(ruleset)
        partners = [
            e for e in self.archive.entries if e.ruleset.key() != improved.key()
        ]
        if partners:
            partner = partners[self.rng.randrange(len(partners))]
            self.path_relink(improved, partner.ruleset)
        self.generation += 1

    def run(self, iterations: int):
        for _ in range(iterations):
            self.iterate()

    def snapshot(self):
        return self.generation, self.archive.snapshot()

    def sample_misclassified(
        self, ruleset: RuleSet, n: int, rng: random.Random | None = None
    ) -> list[str]:
        """Up to n record ids that the ruleset skips and whose skipping
        contributes to a missed remark, sampled uniformly."""
        rng = rng if rng is not None else self.rng
        mask = self.index.skip_mask(ruleset)
        contributing: set[int] = set()
        for _, _, _, idx in self.index.remark_rows:
            if len(idx) > 0 and bool(np.all(mask[idx])):
                contributing.update(int(i) for i in idx if mask[i])
        pool = sorted(contributing)
        if n <= 0 or not pool:
            return []
        chosen = rng.sample(pool, min(n, len(pool)))
        return [self.index.record_ids[i] for i in sorted(chosen)]
