"""Interpolated n-gram model over code tokens and per-token entropies.

Probabilities interpolate each order with the one below it and bottom out in
an add-one unigram with an extra slot for unknown tokens, so every token has
positive probability and each context's distribution sums to one.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

from .model import ABSENT

UNKNOWN = "<unk>"
BOUNDARY = "<s>"

_TOKEN_RE = re.compile(
    r'"(?:\\.|[^"\\])*"'
    r"|'(?:\\.|[^'\\])*'"
    r"|\d[\w.]*"
    r"|[A-Za-z_$][\w$]*"
    r"|\S"
)


def tokenize(text: str) -> list[str]:
    """Split code into tokens: identifiers kept, string and number literals
    collapsed to placeholders, operators and punctuation one token each."""
    out = []
    for m in _TOKEN_RE.finditer(text):
        tok = m.group(0)
        if tok[0] in "\"'":
            out.append("<str>")
        elif tok[0].isdigit():
            out.append("<num>")
        else:
            out.append(tok)
    return out


class NgramModel:
    def __init__(self, order: int, interpolation: float):
        if order < 1:
            raise ValueError("order must be >= 1")
        if not 0 < interpolation < 1:
            raise ValueError("interpolation weight must be in (0, 1)")
        self.order = order
        self.interpolation = interpolation
        self.vocabulary: set[str] = set()
        self.unigram_total = 0
        self.unigram_counts: Counter = Counter()
        # per order k >= 2: context tuple -> (Counter of next tokens, total)
        self.context_counts: list[dict] = [dict() for _ in range(order + 1)]

    def add_sequence(self, tokens: list[str]) -> None:
        padded = [BOUNDARY] * (self.order - 1) + list(tokens)
        for i in range(self.order - 1, len(padded)):
            token = padded[i]
            self.vocabulary.add(token)
            self.unigram_counts[token] += 1
            self.unigram_total += 1
            for k in range(2, self.order + 1):
                ctx = tuple(padded[i - k + 1 : i])
                table = self.context_counts[k].setdefault(ctx, Counter())
                table[token] += 1

    def probability(self, token: str, context: tuple[str, ...]) -> float:
        if token not in self.vocabulary:
            token = UNKNOWN
        vocab_plus_unknown = len(self.vocabulary) + 1
        p = (self.unigram_counts[token] + 1) / (self.unigram_total + vocab_plus_unknown)
        for k in range(2, self.order + 1):
            ctx = tuple(context[-(k - 1) :]) if k > 1 else ()
            if len(ctx) < k - 1:
                ctx = (BOUNDARY,) * (k - 1 - len(ctx)) + ctx
            table = self.context_counts[k].get(ctx)
            if table is None:
                continue  # unseen context: fall through to the lower order
            ml = table[token] / sum(table.values())
            p = self.interpolation * ml + (1 - self.interpolation) * p
        return p

    def distribution_support(self, context: tuple[str, ...]) -> list[str]:
        return sorted(self.vocabulary) + [UNKNOWN]


def train_ngram(token_stream, n: int, interpolation: float) -> NgramModel:
    """Build an interpolated model from one token sequence. An empty stream
    yields the uniform-unknown model (every token scores probability 1)."""
    model = NgramModel(n, interpolation)
    tokens = list(token_stream)
    if tokens:
        model.add_sequence(tokens)
    return model


def token_entropy(model: NgramModel, tokens: list[str]) -> list[float]:
    """Per-token entropies in bits: -log2 p(token | preceding context)."""
    out = []
    context = [BOUNDARY] * (model.order - 1)
    for token in tokens:
        p = model.probability(token, tuple(context))
        out.append(-math.log2(p))
        context.append(token if token in model.vocabulary else UNKNOWN)
        if len(context) > model.order - 1:
            context = context[-(model.order - 1) :] if model.order > 1 else []
    return out


@dataclass(frozen=True)
class EntropyAggregate:
    max: float
    upp_quar: float
    med: float
    sum: float
    avg: float


ABSENT_AGGREGATE = EntropyAggregate(ABSENT, ABSENT, ABSENT, ABSENT, ABSENT)


def _quantile(sorted_values: list[float], q: float) -> float:
    """Linear-interpolation quantile over an ascending list."""
    n = len(sorted_values)
    if n == 1:
        return sorted_values[0]
    pos = q * (n - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    return sorted_values[lo] * (1 - frac) + sorted_values[hi] * frac


def aggregate(entropies: list[float]) -> EntropyAggregate:
    if not entropies:
        return ABSENT_AGGREGATE
    ordered = sorted(entropies)
    total = sum(entropies)
    return EntropyAggregate(
        max=ordered[-1],
        upp_quar=_quantile(ordered, 0.75),
        med=_quantile(ordered, 0.5),
        sum=total,
        avg=total / len(entropies),
    )
