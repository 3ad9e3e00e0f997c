"""Online aggregation: per-batch folding, conservative intervals, streaming.

The running state mirrors the classic online-aggregation accumulator:
som (sum of qualifying tuple values), card (their count), D (the running
minimum of per-tuple membership degrees, 1 until a tuple arrives), and n
(rows sampled so far, qualifying or not).  Estimates:

    AVG    (som / card) * D          undefined while card == 0
    SUM    (m / n) * som * D         expansion-scaled to the population
    COUNT  (m / n) * card * D

The m/n expansion factor is what turns the sampled SUM/COUNT into a
population estimate; the unscaled sample-only figures stay available on
raw_value for inspection.  The half-width of the confidence interval is
the distribution-free Hoeffding bound

    rate = (b - a) * sqrt(ln(2 / (1 - p)) / (2 n))

over the target's observed value interval [a, b] (indicator bounds [0, 1]
for COUNT); SUM and COUNT scale it by m alongside their estimates.  Once
the sample is the population (n == m) the interval collapses to zero and
the stream ends with done = True.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, replace
from typing import Iterator

from .concepts import ExtentEntry, build_concepts_table, build_context, qualifying_tuples
from .errors import ParameterError
from .kb import KnowledgeBase, Relation
from .membership import LinguisticLabel
from .query import ApproximateQuery, resolve_labels
from .sampling import BatchSampler


def error_rate(n: int, p: float, a: float, b: float) -> float:
    """Conservative interval half-width for a mean of n samples in [a, b]."""
    if n < 1:
        raise ParameterError("error rate needs at least one sampled row")
    if not 0.0 < p < 1.0:
        raise ParameterError(f"confidence must lie in (0, 1), got {p}")
    if a > b:
        raise ParameterError(f"value interval out of order: [{a}, {b}]")
    return (b - a) * math.sqrt((1.0 / (2.0 * n)) * math.log(2.0 / (1.0 - p)))


@dataclass(frozen=True)
class RunningEstimate:
    aggregate: str
    interval: tuple[float, float]
    confidence: float
    m: int
    som: float = 0.0
    card: int = 0
    D: float = 1.0
    n: int = 0
    done: bool = False

    @classmethod
    def fresh(cls, aq: ApproximateQuery, m: int) -> "RunningEstimate":
        return cls(
            aggregate=aq.base.aggregate,
            interval=aq.interval,
            confidence=aq.base.confidence,
            m=m,
        )

    @property
    def estimate(self) -> float | None:
        """Current population estimate; None for AVG before any tuple qualifies."""
        if self.aggregate == "AVG":
            if self.card == 0:
                return None
            return (self.som / self.card) * self.D
        if self.n == 0:
            return 0.0
        scale = self.m / self.n
        if self.aggregate == "SUM":
            return scale * self.som * self.D
        return scale * self.card * self.D

    @property
    def raw_value(self) -> float | None:
        """Sample-only figure without the m/n expansion (debugging aid)."""
        if self.aggregate == "AVG":
            return None if self.card == 0 else (self.som / self.card) * self.D
        if self.aggregate == "SUM":
            return self.som * self.D
        return self.card * self.D

    @property
    def plain_mean(self) -> float | None:
        """Unweighted mean of qualifying values, without the D multiplier."""
        return None if self.card == 0 else self.som / self.card

    @property
    def rate(self) -> float | None:
        """Interval half-width at the current n; zero once the scan is complete."""
        if self.n == 0:
            return None
        if self.done or self.n == self.m:
            return 0.0
        a, b = self.interval
        base = error_rate(self.n, self.confidence, a, b)
        return base if self.aggregate == "AVG" else self.m * base


def fold_batch(est: RunningEstimate, tuples: list[ExtentEntry],
               rows_sampled: int) -> RunningEstimate:
    """Fold one batch's qualifying tuples (already deduplicated) into est.

    rows_sampled is the full batch size: non-qualifying rows advance n
    too, since the interval shrinks with everything sampled, not just
    with hits.
    """
    som = est.som
    card = est.card
    D = est.D
    for t in tuples:
        som += t.value
        card += 1
        if t.degree < D:
            D = t.degree
    n = est.n + rows_sampled
    return replace(est, som=som, card=card, D=D, n=n, done=est.done or n >= est.m)


@dataclass(frozen=True)
class ProgressEvent:
    batch: int
    n: int
    m: int
    estimate: float | None
    error_rate: float | None
    confidence: float
    fraction: float
    done: bool
    diagnosis: tuple[tuple[tuple[str, ...], int], ...] | None = None

    def to_wire(self) -> dict:
        """JSON-ready dict; field names are the wire contract."""
        return {
            "batch": self.batch,
            "n": self.n,
            "m": self.m,
            "estimate": self.estimate,
            "error_rate": self.error_rate,
            "confidence": self.confidence,
            "fraction": self.fraction,
            "done": self.done,
            "diagnosis": None if self.diagnosis is None else [
                {"labels": list(labels), "count": count}
                for labels, count in self.diagnosis
            ],
        }


class _DiagnosisTracker:
    """Cumulative empty-answer picture across every batch seen so far."""

    def __init__(self, attributes: tuple[str, ...]):
        self.attributes = attributes
        self.full = frozenset(attributes)
        self.attr_pos = {a: i for i, a in enumerate(attributes)}
        self.signature_counts: dict[frozenset[str], int] = {}
        self.full_satisfied = False

    def add(self, object_attrs: dict[int, frozenset[str]]) -> None:
        for attrs in object_attrs.values():
            self.signature_counts[attrs] = self.signature_counts.get(attrs, 0) + 1
            if attrs == self.full:
                self.full_satisfied = True

    def current(self) -> tuple[tuple[tuple[str, ...], int], ...] | None:
        if self.full_satisfied:
            return None
        satisfiable = {
            sig: sum(c for s, c in self.signature_counts.items() if sig <= s)
            for sig in self.signature_counts
        }
        maximal = [
            sig for sig in satisfiable
            if not any(sig < other for other in satisfiable)
        ]
        maximal.sort(key=lambda sig: (-len(sig), -satisfiable[sig]))
        return tuple(
            (tuple(sorted(sig, key=self.attr_pos.get)), satisfiable[sig])
            for sig in maximal
        )


def run_query(kb: KnowledgeBase, aq: ApproximateQuery, sampler: BatchSampler,
              relation: Relation, labels: list[LinguisticLabel],
              cancel: threading.Event | None = None) -> Iterator[ProgressEvent]:
    """Stream progressively refined estimates until exhaustion or cancel.

    One event per batch, in order.  The final event of a full run has
    done=True and a zero-width interval; a cancelled run just stops after
    the in-flight batch, leaving done=False.
    """
    q = aq.base
    est = RunningEstimate.fresh(aq, sampler.m)
    tracker = _DiagnosisTracker(tuple(lab.key for lab in resolve_labels(q, labels)))
    while True:
        if cancel is not None and cancel.is_set():
            return
        batch = sampler.next_batch()
        if batch is None:
            return
        ctx = build_context(batch, kb, q, labels)
        table = build_concepts_table(ctx, kb, q, relation, context_id=batch.index)
        tuples = qualifying_tuples(table)
        est = fold_batch(est, tuples, len(batch.ids))
        tracker.add(ctx.object_attrs)
        yield ProgressEvent(
            batch=batch.index,
            n=est.n,
            m=est.m,
            estimate=est.estimate,
            error_rate=est.rate,
            confidence=est.confidence,
            fraction=est.n / est.m if est.m else 1.0,
            done=est.done,
            diagnosis=tracker.current(),
        )
        if est.done:
            return


def exact_answer(kb: KnowledgeBase, aq: ApproximateQuery, relation: Relation,
                 labels: list[LinguisticLabel]) -> float | None:
    """Full-scan answer with the same dedup and min-degree rules, no sampling.

    AVG over zero qualifying tuples is undefined (None); SUM and COUNT
    are 0 there.
    """
    q = aq.base
    keys = frozenset(lab.key for lab in resolve_labels(q, labels))
    target = q.target
    som = 0.0
    card = 0
    D = 1.0
    for rid in relation.ids:
        stored = kb.degrees(rid)
        mine = [stored[k] for k in keys if k in stored]
        if not mine:
            continue
        degree = min(mine)
        som += relation.value(rid, target) if target is not None else 0.0
        card += 1
        if degree < D:
            D = degree
    if q.aggregate == "AVG":
        return None if card == 0 else (som / card) * D
    if q.aggregate == "SUM":
        return som * D
    return card * D
