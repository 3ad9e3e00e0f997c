"""The flexible-query dialect: parsing, validation, rewriting.

Surface grammar (keywords case-insensitive, identifiers case-preserving)::

    SELECT <AGG> '(' [attr | '*'] ')' FROM <table>
    WHERE <attr> IS <label> { AND <attr> IS <label> }
    [ WITH CONFIDENCE <real> ]

AGG is one of AVG, SUM, COUNT.  COUNT accepts '*', an attribute, or
nothing inside the parentheses; AVG and SUM require an attribute.  This
grammar is the only query wire syntax: the CLI and the HTTP service both
accept exactly it.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParameterError, RangeError
from .kb import KnowledgeBase, Relation
from .membership import LinguisticLabel, find_label

AGGREGATES = ("AVG", "SUM", "COUNT")
_KEYWORDS = {"SELECT", "FROM", "WHERE", "IS", "AND", "WITH", "CONFIDENCE"}

DEFAULT_CONFIDENCE = 0.95


class QuerySyntaxError(Exception):
    """Parse/shape diagnostic; position is a 0-based character offset."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


@dataclass(frozen=True)
class FlexibleQuery:
    """Parsed aggregate query with fuzzy IS predicates."""

    aggregate: str
    target: str | None
    table: str
    predicates: tuple[tuple[str, str], ...]
    confidence: float = DEFAULT_CONFIDENCE

    def __post_init__(self):
        if self.aggregate not in AGGREGATES:
            raise ParameterError(f"unsupported aggregate {self.aggregate!r}")
        if not self.predicates:
            raise ParameterError("a flexible query needs at least one predicate")
        if not 0.0 < self.confidence < 1.0:
            raise ParameterError(f"confidence must lie in (0, 1), got {self.confidence}")
        if self.aggregate != "COUNT" and self.target is None:
            raise ParameterError(f"{self.aggregate} requires a target attribute")

    def render(self) -> str:
        """Canonical text form; parses back to an equal AST."""
        target = self.target if self.target is not None else "*"
        preds = " AND ".join(f"{a} IS {l}" for a, l in self.predicates)
        return (
            f"SELECT {self.aggregate}({target}) FROM {self.table} "
            f"WHERE {preds} WITH CONFIDENCE {self.confidence!r}"
        )


@dataclass(frozen=True)
class ApproximateQuery:
    """A validated query annotated with the target value interval and sample %."""

    base: FlexibleQuery
    interval: tuple[float, float]
    sample_pct: float

    def __post_init__(self):
        a, b = self.interval
        if not a <= b:
            raise ParameterError(f"interval bounds out of order: [{a}, {b}]")
        if not 0.0 < self.sample_pct <= 100.0:
            raise ParameterError(f"sample percentage must lie in (0, 100], got {self.sample_pct}")

    @property
    def error_spec(self) -> tuple[tuple[float, float], float]:
        return (self.interval, self.base.confidence)

    def render(self) -> str:
        return self.base.render()


# ---------------------------------------------------------------------------
# tokenizer + recursive descent
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[()*]))"
)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []  # (kind, value, position)
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                bad_at = len(text) - len(stripped)
                raise QuerySyntaxError(f"unexpected character {text[bad_at]!r}", bad_at)
            if m.lastgroup == "num":
                self.items.append(("num", m.group("num"), m.start("num")))
            elif m.lastgroup == "ident":
                self.items.append(("ident", m.group("ident"), m.start("ident")))
            else:
                self.items.append(("sym", m.group("sym"), m.start("sym")))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.items[self.i] if self.i < len(self.items) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_keyword(self, word: str):
        kind, value, pos = self.next()
        if kind != "ident" or value.upper() != word:
            raise QuerySyntaxError(f"expected {word}, got {value!r}", pos)

    def expect_sym(self, sym: str):
        kind, value, pos = self.next()
        if kind != "sym" or value != sym:
            raise QuerySyntaxError(f"expected {sym!r}, got {value!r}", pos)

    def expect_identifier(self, what: str) -> tuple[str, int]:
        kind, value, pos = self.next()
        if kind != "ident" or value.upper() in _KEYWORDS or value.upper() in AGGREGATES:
            raise QuerySyntaxError(f"expected {what}, got {value!r}", pos)
        return value, pos


def parse(text: str) -> FlexibleQuery:
    """Parse query text into a FlexibleQuery.

    Total on strings: returns an AST or raises QuerySyntaxError, nothing
    else.  Keywords are case-insensitive, identifiers keep their case.
    """
    toks = _Tokens(text)
    toks.expect_keyword("SELECT")

    kind, value, pos = toks.next()
    if kind != "ident":
        raise QuerySyntaxError(f"expected an aggregate function, got {value!r}", pos)
    aggregate = value.upper()
    if aggregate not in AGGREGATES:
        raise QuerySyntaxError(
            f"unsupported aggregate {value!r}; expected AVG, SUM or COUNT", pos
        )

    toks.expect_sym("(")
    target: str | None = None
    kind, value, pos = toks.peek()
    if kind == "sym" and value == "*":
        toks.next()
        if aggregate != "COUNT":
            raise QuerySyntaxError(f"{aggregate} requires an attribute, not '*'", pos)
    elif kind == "sym" and value == ")":
        if aggregate != "COUNT":
            raise QuerySyntaxError(f"{aggregate} requires an attribute", pos)
    else:
        target, _ = toks.expect_identifier("an attribute name")
    toks.expect_sym(")")

    toks.expect_keyword("FROM")
    table, _ = toks.expect_identifier("a table name")

    toks.expect_keyword("WHERE")
    predicates: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    while True:
        attr, _ = toks.expect_identifier("an attribute name")
        toks.expect_keyword("IS")
        label, lpos = toks.expect_identifier("a label name")
        ident = (attr.lower(), label.lower())
        if ident in seen:
            raise QuerySyntaxError(f"duplicate predicate {attr} IS {label}", lpos)
        seen.add(ident)
        predicates.append((attr, label))
        kind, value, pos = toks.peek()
        if kind == "ident" and value.upper() == "AND":
            toks.next()
            continue
        break

    confidence = DEFAULT_CONFIDENCE
    kind, value, pos = toks.peek()
    if kind == "ident" and value.upper() == "WITH":
        toks.next()
        toks.expect_keyword("CONFIDENCE")
        kind, value, pos = toks.next()
        if kind != "num":
            raise QuerySyntaxError(f"expected a confidence value, got {value!r}", pos)
        confidence = float(value)
        if not 0.0 < confidence < 1.0:
            raise QuerySyntaxError(f"confidence must lie in (0, 1), got {value}", pos)

    kind, value, pos = toks.peek()
    if kind is not None:
        raise QuerySyntaxError(f"unexpected trailing input {value!r}", pos)

    return FlexibleQuery(
        aggregate=aggregate,
        target=target,
        table=table,
        predicates=tuple(predicates),
        confidence=confidence,
    )


# ---------------------------------------------------------------------------
# validation and rewriting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    message: str
    predicate_index: int | None = None

    def __str__(self):
        if self.predicate_index is None:
            return self.message
        return f"predicate #{self.predicate_index}: {self.message}"


def validate(
    q: FlexibleQuery,
    kb: KnowledgeBase,
    labels: list[LinguisticLabel],
    relation: Relation | None = None,
) -> list[Diagnostic]:
    """Check q against the KB's catalog; empty list means ok.

    Table and identifier matching is case-insensitive.  When the source
    relation is at hand, the target attribute is checked against it
    (catching non-numeric columns); otherwise the KB's recorded value
    ranges stand in for the relation's numeric schema.
    """
    out: list[Diagnostic] = []
    if q.table.lower() != kb.source.lower():
        out.append(Diagnostic(f"table {q.table!r} does not match KB source {kb.source!r}"))
    for i, (attr, name) in enumerate(q.predicates):
        if find_label(labels, attr, name) is None:
            out.append(Diagnostic(f"unknown label {attr}-{name}", predicate_index=i))
    if q.target is not None:
        if relation is not None:
            if relation.resolve_attribute(q.target) is None:
                why = "non-numeric" if relation.is_non_numeric(q.target) else "missing"
                out.append(Diagnostic(f"target attribute {q.target!r} is {why}"))
        elif not any(a.lower() == q.target.lower() for a in kb.value_ranges):
            out.append(Diagnostic(f"target attribute {q.target!r} is missing"))
    return out


def resolve_labels(q: FlexibleQuery, labels: list[LinguisticLabel]) -> list[LinguisticLabel]:
    """Catalog labels for q's predicates, in predicate order."""
    out = []
    for attr, name in q.predicates:
        lab = find_label(labels, attr, name)
        if lab is None:
            raise ParameterError(f"query was not validated: unknown label {attr}-{name}")
        out.append(lab)
    return out


def rewrite(
    q: FlexibleQuery,
    sample_pct: float,
    ranges: dict[str, tuple[float, float]],
) -> ApproximateQuery:
    """Attach the target's observed value interval and the sample percentage.

    COUNT estimates a scaled mean of 0/1 indicators, so its interval is
    [0, 1].  An empty relation has no observed ranges and cannot be
    rewritten.
    """
    if q.aggregate == "COUNT":
        interval = (0.0, 1.0)
    else:
        match = next((r for a, r in ranges.items() if a.lower() == q.target.lower()), None)
        if match is None:
            raise RangeError(
                f"no observed value range for {q.target!r} (empty relation?)"
            )
        interval = match
    return ApproximateQuery(base=q, interval=interval, sample_pct=sample_pct)
