"""Relations (in-memory columnar tables) and the fuzzy knowledge base.

The knowledge base holds, for every row of the source relation, the
membership degree of that row in each linguistic label, pruned at a
threshold tau: degrees < tau are simply absent.  It is immutable after
construction and rebuilt from scratch when the relation changes.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .errors import KBFormatError, ParameterError, SchemaError
from .membership import LinguisticLabel, evaluate_label


@dataclass
class Relation:
    """A named table: unique integer row ids plus numeric columns.

    Columns that fail numeric parsing are tracked by name only; touching
    one through a label or query raises SchemaError at that point, not at
    ingestion.
    """

    name: str
    ids: list[int]
    columns: dict[str, list[float]]
    non_numeric: frozenset[str] = frozenset()

    def __post_init__(self):
        if len(set(self.ids)) != len(self.ids):
            raise SchemaError(f"relation {self.name!r} has duplicate row ids")
        for attr, values in self.columns.items():
            if len(values) != len(self.ids):
                raise SchemaError(
                    f"column {attr!r} has {len(values)} values for {len(self.ids)} rows"
                )
        self._index = {rid: i for i, rid in enumerate(self.ids)}

    def __len__(self) -> int:
        return len(self.ids)

    def resolve_attribute(self, name: str) -> str | None:
        """Canonical column name for a case-insensitive reference, or None."""
        lowered = name.lower()
        for attr in self.columns:
            if attr.lower() == lowered:
                return attr
        return None

    def is_non_numeric(self, name: str) -> bool:
        return name.lower() in {a.lower() for a in self.non_numeric}

    def value(self, row_id: int, attribute: str) -> float:
        attr = self.resolve_attribute(attribute)
        if attr is None:
            raise SchemaError(f"relation {self.name!r} has no numeric attribute {attribute!r}")
        return self.columns[attr][self._index[row_id]]

    def value_ranges(self) -> dict[str, tuple[float, float]]:
        """Observed (min, max) per numeric attribute; empty for an empty relation."""
        if not self.ids:
            return {}
        return {attr: (min(vals), max(vals)) for attr, vals in self.columns.items()}


def relation_from_csv(text: str, name: str, id_column: str | None = None) -> Relation:
    """Ingest a CSV with a header row.

    The id column (first column unless id_column names another) must hold
    unique integers.  Remaining columns are parsed as floats where every
    cell parses; otherwise the column is kept as a name-only non-numeric
    marker.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("CSV is empty: no header row") from None
    header = [h.strip() for h in header]
    if not header or any(not h for h in header):
        raise SchemaError("CSV header has empty column names")
    if id_column is None:
        id_idx = 0
    else:
        matches = [i for i, h in enumerate(header) if h.lower() == id_column.lower()]
        if not matches:
            raise SchemaError(f"id column {id_column!r} not found in header {header}")
        id_idx = matches[0]

    rows: list[list[str]] = []
    for line_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # skip blank lines
        if len(row) != len(header):
            raise SchemaError(
                f"CSV row at line {line_no} has {len(row)} cells, header has {len(header)}"
            )
        rows.append([c.strip() for c in row])

    ids: list[int] = []
    for line_no, row in enumerate(rows, start=2):
        try:
            ids.append(int(row[id_idx]))
        except ValueError:
            raise SchemaError(
                f"row id {row[id_idx]!r} at line {line_no} is not an integer"
            ) from None

    columns: dict[str, list[float]] = {}
    non_numeric: set[str] = set()
    for j, attr in enumerate(header):
        if j == id_idx:
            continue
        try:
            columns[attr] = [float(row[j]) for row in rows]
        except ValueError:
            non_numeric.add(attr)
    return Relation(name=name, ids=ids, columns=columns, non_numeric=frozenset(non_numeric))


@dataclass
class KnowledgeBase:
    """Threshold-pruned per-row membership degrees for a label catalog.

    entries maps row id -> {label key -> degree}; only degrees >= tau
    (and > 0) are present.  m is the source relation's row count, which
    can exceed len(entries) when rows fail every label.
    """

    source: str
    tau: float
    m: int
    entries: dict[int, dict[str, float]]
    value_ranges: dict[str, tuple[float, float]] = field(default_factory=dict)

    def degrees(self, row_id: int) -> dict[str, float]:
        return self.entries.get(row_id, {})


def build_kb(rel: Relation, labels: list[LinguisticLabel], tau: float) -> KnowledgeBase:
    """Evaluate every label on every row and keep degrees >= tau.

    Degree 0 is never stored, even at tau = 0.  Deterministic: the same
    relation, labels and tau always produce an identical KB.
    """
    if not 0.0 <= tau <= 1.0:
        raise ParameterError(f"threshold must lie in [0, 1], got {tau}")
    ranges = rel.value_ranges()
    resolved: list[tuple[str, str, LinguisticLabel]] = []
    seen: set[str] = set()
    for lab in labels:
        attr = rel.resolve_attribute(lab.attribute)
        if attr is None:
            if rel.is_non_numeric(lab.attribute):
                raise SchemaError(
                    f"label {lab.key!r} references non-numeric attribute {lab.attribute!r}"
                )
            raise SchemaError(
                f"label {lab.key!r} references missing attribute {lab.attribute!r}"
            )
        if lab.key.lower() in seen:
            raise SchemaError(f"duplicate label key {lab.key!r}")
        seen.add(lab.key.lower())
        resolved.append((attr, lab.key, lab))

    entries: dict[int, dict[str, float]] = {}
    for rid in rel.ids:
        row: dict[str, float] = {}
        for attr, key, lab in resolved:
            g = evaluate_label(rel.value(rid, attr), lab, ranges[attr])
            if g >= tau and g > 0.0:
                row[key] = g
        if row:
            entries[rid] = row
    return KnowledgeBase(
        source=rel.name, tau=tau, m=len(rel), entries=entries, value_ranges=ranges
    )


# ---------------------------------------------------------------------------
# persistence: line-delimited text, one record per row id
#
#   #softagg-kb 1
#   #source<TAB>employee
#   #tau<TAB>0.4
#   #m<TAB>6
#   #range<TAB>Salary<TAB>400.0<TAB>900.0
#   1<TAB>Salary-Low=1.0;Age-Young=0.7
#
# Degrees and range bounds are printed as shortest round-trip decimals,
# so load(save(kb)) reproduces every degree bit for bit.
# ---------------------------------------------------------------------------

_MAGIC = "#softagg-kb"


def dump_kb(kb: KnowledgeBase) -> str:
    out = [f"{_MAGIC}\t1"]
    out.append(f"#source\t{kb.source}")
    out.append(f"#tau\t{kb.tau!r}")
    out.append(f"#m\t{kb.m}")
    for attr in sorted(kb.value_ranges):
        lo, hi = kb.value_ranges[attr]
        out.append(f"#range\t{attr}\t{lo!r}\t{hi!r}")
    for rid in sorted(kb.entries):
        cells = ";".join(f"{key}={g!r}" for key, g in kb.entries[rid].items())
        out.append(f"{rid}\t{cells}")
    return "\n".join(out) + "\n"


def save_kb(kb: KnowledgeBase, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_kb(kb))


def parse_kb(text: str) -> KnowledgeBase:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_MAGIC):
        raise KBFormatError(f"missing {_MAGIC} header", line=1)
    source = None
    tau = None
    m = None
    ranges: dict[str, tuple[float, float]] = {}
    entries: dict[int, dict[str, float]] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        tag = parts[0]
        try:
            if tag == "#source":
                source = parts[1]
            elif tag == "#tau":
                tau = float(parts[1])
            elif tag == "#m":
                m = int(parts[1])
            elif tag == "#range":
                ranges[parts[1]] = (float(parts[2]), float(parts[3]))
            elif tag.startswith("#"):
                raise KBFormatError(f"unknown header tag {tag!r}", line=line_no)
            else:
                rid = int(tag)
                if len(parts) != 2:
                    raise KBFormatError("expected 'row_id<TAB>cells'", line=line_no)
                row: dict[str, float] = {}
                for cell in parts[1].split(";"):
                    if not cell:
                        continue
                    key, eq, deg = cell.partition("=")
                    if not eq:
                        raise KBFormatError("cell has no '='", line=line_no, field=cell)
                    row[key] = float(deg)
                if rid in entries:
                    raise KBFormatError(f"duplicate row id {rid}", line=line_no)
                entries[rid] = row
        except KBFormatError:
            raise
        except (IndexError, ValueError) as exc:
            raise KBFormatError(str(exc), line=line_no, field=parts[0]) from exc
    if source is None or tau is None or m is None:
        raise KBFormatError("incomplete headers: need #source, #tau and #m", line=1)
    return KnowledgeBase(source=source, tau=tau, m=m, entries=entries, value_ranges=ranges)


def load_kb(path) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return parse_kb(fh.read())
