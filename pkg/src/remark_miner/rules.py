"""The skip/unless ruleset DSL: parse, canonical print, and evaluation.

A record is skipped when some inclusion rule matches and no exclusion rule
does. Conditions are propositional: equals / not-equal on categorical and
boolean features, less-or-equal / greater-or-equal on numeric ones. ABSENT
feature values never match any condition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .catalog import BOOLEAN, CATEGORICAL, FEATURE_KINDS, NUMERIC
from .model import ABSENT, DataError

EQ = "=="
NEQ = "!="
LEQ = "<="
GEQ = ">="

_OPS = (EQ, NEQ, LEQ, GEQ)


class RulesetParseError(DataError):
    pass


@dataclass(frozen=True)
class Condition:
    feature: str
    operator: str
    literal: str | float

    def __str__(self):
        if isinstance(self.literal, str):
            return f"{self.feature} {self.operator} '{self.literal}'"
        return f"{self.feature} {self.operator} {self.literal!r}"

    def matches(self, features: dict) -> bool:
        value = features.get(self.feature, ABSENT)
        if value is ABSENT:
            return False
        if self.operator in (EQ, NEQ):
            if isinstance(value, bool):
                value = "true" if value else "false"
            return (value == self.literal) == (self.operator == EQ)
        value = float(value)
        return value <= self.literal if self.operator == LEQ else value >= self.literal


@dataclass(frozen=True)
class Rule:
    conditions: tuple[Condition, ...]

    def __str__(self):
        return "(" + " and ".join(str(c) for c in self.conditions) + ")"

    def matches(self, features: dict) -> bool:
        return all(c.matches(features) for c in self.conditions)

    def features_used(self):
        return {c.feature for c in self.conditions}


def make_rule(conditions) -> Rule:
    """Canonical rule: conditions deduplicated and sorted."""
    ordered = sorted(set(conditions), key=lambda c: (c.feature, c.operator, str(c.literal)))
    if not ordered:
        raise ValueError("a rule needs at least one condition")
    return Rule(conditions=tuple(ordered))


@dataclass(frozen=True)
class RuleSet:
    incl: tuple[Rule, ...] = ()
    excl: tuple[Rule, ...] = ()

    def key(self):
        """Order-free identity, used for archive duplicate checks."""
        return (frozenset(self.incl), frozenset(self.excl))

    @property
    def complexity(self) -> int:
        return sum(len(r.conditions) for r in self.incl + self.excl)

    def features_used(self):
        out = set()
        for rule in self.incl + self.excl:
            out |= rule.features_used()
        return out


def make_ruleset(incl, excl=()) -> RuleSet:
    """Canonical ruleset: duplicate rules dropped, first occurrence kept."""

    def dedup(rules):
        seen = set()
        out = []
        for rule in rules:
            if rule not in seen:
                seen.add(rule)
                out.append(rule)
        return tuple(out)

    return RuleSet(incl=dedup(incl), excl=dedup(excl))


def skip(ruleset: RuleSet, record_features: dict) -> bool:
    if any(rule.matches(record_features) for rule in ruleset.excl):
        return False
    return any(rule.matches(record_features) for rule in ruleset.incl)


_CONDITION_RE = re.compile(
    r"\s*([A-Za-z_][\w]*)\s*(==|!=|<=|>=)\s*('(?:[^'])*'|-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)\s*"
)


def _parse_condition(text: str) -> Condition:
    m = _CONDITION_RE.fullmatch(text)
    if not m:
        raise RulesetParseError(f"cannot parse condition {text.strip()!r}")
    feature, operator, literal = m.group(1), m.group(2), m.group(3)
    kind = FEATURE_KINDS.get(feature)
    if kind is None:
        raise RulesetParseError(f"unknown feature {feature!r}")
    if literal.startswith("'"):
        value: str | float = literal[1:-1]
        if kind == NUMERIC:
            raise RulesetParseError(
                f"feature {feature!r} is numeric; string literal {literal} not allowed"
            )
        if operator not in (EQ, NEQ):
            raise RulesetParseError(
                f"operator {operator} not allowed on {kind} feature {feature!r}"
            )
    else:
        value = float(literal)
        if kind in (CATEGORICAL, BOOLEAN):
            raise RulesetParseError(
                f"feature {feature!r} is {kind}; numeric literal {literal} not allowed"
            )
        if operator not in (LEQ, GEQ):
            raise RulesetParseError(
                f"operator {operator} not allowed on numeric feature {feature!r}"
            )
    return Condition(feature=feature, operator=operator, literal=value)


def parse_rule(text: str) -> Rule:
    """One parenthesized conjunction, e.g. `(binary == 'true' and oldHunkSize <= 3.0)`."""
    body = text.strip()
    if body.startswith("or "):
        body = body[3:].strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise RulesetParseError(f"rule must be parenthesized: {text.strip()!r}")
    inner = body[1:-1]
    parts = re.split(r"\s+and\s+", inner)
    return make_rule(_parse_condition(p) for p in parts)


def parse_ruleset(text: str) -> RuleSet:
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines or lines[0].strip() != "skip when one of":
        raise RulesetParseError("ruleset must start with 'skip when one of'")
    incl: list[Rule] = []
    excl: list[Rule] = []
    target = incl
    for line in lines[1:]:
        stripped = line.strip()
        if stripped == "unless one of":
            if target is excl:
                raise RulesetParseError("duplicate 'unless one of' section")
            target = excl
            continue
        target.append(parse_rule(line))
    return make_ruleset(incl, excl)


def print_ruleset(ruleset: RuleSet) -> str:
    """Canonical text: the inverse of parse_ruleset up to normalization."""
    lines = ["skip when one of"]
    for i, rule in enumerate(ruleset.incl):
        prefix = "  " if i == 0 else "  or "
        lines.append(prefix + str(rule))
    if ruleset.excl:
        lines.append("unless one of")
        for i, rule in enumerate(ruleset.excl):
            prefix = "  " if i == 0 else "  or "
            lines.append(prefix + str(rule))
    return "\n".join(lines) + "\n"
