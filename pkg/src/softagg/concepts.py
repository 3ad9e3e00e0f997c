"""Per-batch formal concept tables over the query's predicates.

A batch of sampled rows becomes a formal context: objects are the rows
holding at least one stored degree among the query's labels, attributes
are those labels, and incidence means "the KB kept a degree for this
pair".  The concepts table is the tabular form of that context's concept
lattice: one row per concept carrying level/node numbering, intent,
extent (with per-tuple degree and target value), covering links, and the
two cardinalities.

Level numbering starts at the most specific concept: level 1 holds the
full query intent, and levels grow as intents shrink, i.e.
level = (k - |intent|) + 1 for k query predicates.  Two structural rows
are always present regardless of closure status: the top row (full
intent, possibly empty extent) and the bottom row (empty intent, every
object).  An empty context collapses both into a single full-intent row.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import SchemaError
from .kb import KnowledgeBase, Relation
from .membership import LinguisticLabel
from .query import FlexibleQuery, resolve_labels
from .sampling import SampleBatch


@dataclass
class FormalContext:
    """Boolean incidence between sampled rows and the query's labels."""

    objects: list[int]                      # batch order
    attributes: tuple[str, ...]             # label keys, predicate order
    object_attrs: dict[int, frozenset[str]]

    def incident(self, obj: int, attribute: str) -> bool:
        return attribute in self.object_attrs.get(obj, frozenset())


class ExtentEntry(NamedTuple):
    row_id: int
    degree: float
    value: float


class LinkRef(NamedTuple):
    context: int
    level: int
    node: int


@dataclass(frozen=True)
class ConceptRow:
    context_id: int
    level: int
    node: int
    intent: tuple[str, ...]
    extent: tuple[ExtentEntry, ...]
    successors: tuple[LinkRef, ...]
    predecessors: tuple[LinkRef, ...]

    @property
    def t_i(self) -> int:
        return len(self.intent)

    @property
    def t_e(self) -> int:
        return len(self.extent)


@dataclass
class ConceptsTable:
    rows: list[ConceptRow]
    k: int
    attributes: tuple[str, ...]
    context_id: int

    def full_intent_row(self) -> ConceptRow:
        return self.rows[0]

    def bottom_row(self) -> ConceptRow:
        return self.rows[-1]


def build_context(batch: SampleBatch, kb: KnowledgeBase, q: FlexibleQuery,
                  labels: list[LinguisticLabel]) -> FormalContext:
    """Restrict the batch to the query's labels.

    Rows without a single stored degree among the query labels do not
    become objects; they still count toward the rows-sampled tally that
    the aggregator keeps.
    """
    keys = tuple(lab.key for lab in resolve_labels(q, labels))
    key_set = frozenset(keys)
    objects: list[int] = []
    object_attrs: dict[int, frozenset[str]] = {}
    for rid in batch.ids:
        stored = kb.degrees(rid)
        present = frozenset(k for k in key_set if k in stored)
        if present:
            objects.append(rid)
            object_attrs[rid] = present
    return FormalContext(objects=objects, attributes=keys, object_attrs=object_attrs)


def _tuple_annotation(rid: int, ctx: FormalContext, kb: KnowledgeBase,
                      relation: Relation, target: str | None) -> ExtentEntry:
    # degree = min over the row's own stored query-label degrees, not the
    # concept intent's: a row missing one conjunct still carries the degree
    # of the conjuncts it does satisfy (cooperative semantics).
    stored = kb.degrees(rid)
    degree = min(stored[k] for k in ctx.object_attrs[rid])
    value = relation.value(rid, target) if target is not None else 0.0
    return ExtentEntry(rid, degree, value)


def build_concepts_table(ctx: FormalContext, kb: KnowledgeBase, q: FlexibleQuery,
                         relation: Relation, context_id: int = 1) -> ConceptsTable:
    """Enumerate all formal concepts of ctx and lay them out as a table.

    Closed intents are found by intersecting object attribute sets (the
    closure of every subset of objects shows up as such an intersection),
    then the two structural rows are forced in.  k is tiny -- it is the
    query's predicate count -- so no sophistication is needed here.
    """
    if relation is None:
        raise SchemaError("concepts table needs the source relation for tuple values")
    k = len(ctx.attributes)
    full = frozenset(ctx.attributes)
    attr_pos = {a: i for i, a in enumerate(ctx.attributes)}

    if not ctx.objects:
        row = ConceptRow(
            context_id=context_id, level=1, node=1,
            intent=ctx.attributes, extent=(),
            successors=(), predecessors=(),
        )
        return ConceptsTable(rows=[row], k=k, attributes=ctx.attributes,
                             context_id=context_id)

    closed: set[frozenset[str]] = {full}
    for attrs in ctx.object_attrs.values():
        closed |= {attrs & c for c in closed}
        closed.add(attrs)
    closed.add(frozenset())  # forced bottom row, closed or not

    annotations = {
        rid: _tuple_annotation(rid, ctx, kb, relation, q.target) for rid in ctx.objects
    }

    def extent_of(intent: frozenset[str]) -> tuple[ExtentEntry, ...]:
        return tuple(
            annotations[rid] for rid in ctx.objects if intent <= ctx.object_attrs[rid]
        )

    def intent_sort_key(intent: frozenset[str]):
        ext = extents[intent]
        return (-len(ext), tuple(sorted(attr_pos[a] for a in intent)))

    extents = {intent: extent_of(intent) for intent in closed}

    by_level: dict[int, list[frozenset[str]]] = {}
    for intent in closed:
        by_level.setdefault(k - len(intent) + 1, []).append(intent)

    numbering: dict[frozenset[str], tuple[int, int]] = {}
    ordered: list[frozenset[str]] = []
    for level in sorted(by_level):
        members = sorted(by_level[level], key=intent_sort_key)
        for node, intent in enumerate(members, start=1):
            numbering[intent] = (level, node)
            ordered.append(intent)

    def covers(larger: frozenset[str], smaller: frozenset[str]) -> bool:
        if not smaller < larger:
            return False
        return not any(smaller < mid < larger for mid in closed)

    rows: list[ConceptRow] = []
    for intent in ordered:
        level, node = numbering[intent]
        succ = tuple(
            LinkRef(context_id, *numbering[other])
            for other in ordered if covers(intent, other)
        )
        pred = tuple(
            LinkRef(context_id, *numbering[other])
            for other in ordered if covers(other, intent)
        )
        rows.append(ConceptRow(
            context_id=context_id, level=level, node=node,
            intent=tuple(sorted(intent, key=attr_pos.get)),
            extent=extents[intent], successors=succ, predecessors=pred,
        ))
    return ConceptsTable(rows=rows, k=k, attributes=ctx.attributes, context_id=context_id)


def qualifying_tuples(t: ConceptsTable) -> list[ExtentEntry]:
    """Every context object exactly once, with its (degree, value) annotation.

    This is the bottom row's extent: iterating every concept's extent
    instead would double-count objects that sit in overlapping extents.
    """
    return list(t.bottom_row().extent)


def diagnose_empty(t: ConceptsTable) -> list[tuple[tuple[str, ...], int]]:
    """Satisfiable relaxations when the full conjunction has no support.

    Returns maximal proper sub-intents with nonempty extents, widest
    intent first, then larger extents first; empty when the full intent
    is itself satisfiable.  Maximality makes singletons disappear when a
    pair containing them is satisfiable.
    """
    if t.full_intent_row().extent:
        return []
    candidates = [
        row for row in t.rows
        if row.intent and len(row.intent) < t.k and row.extent
    ]
    keep: list[ConceptRow] = []
    for row in candidates:
        mine = frozenset(row.intent)
        if not any(mine < frozenset(other.intent) for other in candidates):
            keep.append(row)
    keep.sort(key=lambda r: (-len(r.intent), -len(r.extent)))
    return [(row.intent, len(row.extent)) for row in keep]


def dump_table(t: ConceptsTable) -> str:
    """Debug dump in the table's column order (tab-delimited)."""
    header = ["C#", "Niv#", "N#", "Int#", "Ext#", "L_s#", "L_p#", "T_i", "T_e"]
    lines = ["\t".join(header)]
    for row in t.rows:
        intent = " ".join(row.intent) if row.intent else "∅"
        extent = (
            " ".join(f"{e.row_id}({e.degree!r};{e.value!r})" for e in row.extent)
            if row.extent else "∅"
        )
        succ = " ".join(f"({l.context},{l.level},{l.node})" for l in row.successors) or "0"
        pred = " ".join(f"({l.context},{l.level},{l.node})" for l in row.predecessors) or "0"
        lines.append("\t".join([
            str(row.context_id), str(row.level), str(row.node),
            intent, extent, succ, pred, str(row.t_i), str(row.t_e),
        ]))
    return "\n".join(lines) + "\n"
