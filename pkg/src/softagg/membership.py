r"""Fuzzy membership: trapezoidal degrees and linguistic labels.

Every supported shape (trapezoid, triangular, singleton, L, gamma) is
reduced to a single trapezoid evaluation with support [a, d] and core
[b, c]:

          1 |        ______
            |       /      \
            |      /        \
          0 |_____/          \______
                 a   b     c  d

Half-open shapes (L, gamma) get their unbounded side encoded as a
sentinel bound: the attribute's observed min/max pushed out by one full
span when a value range is known, +/-inf otherwise.  Either way the
piecewise formula below is the only evaluation path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import yaml

from .errors import CatalogError, ParameterError, ShapeError

SHAPES = ("trapezoid", "triangular", "singleton", "L", "gamma")

# arity of the raw parameter tuple per shape
_SHAPE_ARITY = {"trapezoid": 4, "triangular": 3, "singleton": 1, "L": 2, "gamma": 2}


@dataclass(frozen=True)
class TrapezoidParams:
    """Support [a, d], core [b, c]; units are those of the attribute."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if math.isnan(self.a) or math.isnan(self.b) or math.isnan(self.c) or math.isnan(self.d):
            raise ParameterError(f"trapezoid bounds must not be NaN: {self}")
        if not (self.a <= self.b <= self.c <= self.d):
            raise ParameterError(
                f"trapezoid bounds must satisfy a <= b <= c <= d, got "
                f"({self.a}, {self.b}, {self.c}, {self.d})"
            )


def membership(x: float, p: TrapezoidParams) -> float:
    """Degree of x in the trapezoid p, in [0, 1].

    1 on the core [b, c]; linear ramps on [a, b) and (c, d]; 0 outside
    the support.  Degenerate ramps (a == b or c == d) never divide by
    zero: the core branch already claimed those points, so the value
    jumps straight from 0 to 1 at the shared bound.
    """
    if x < p.a or x > p.d:
        return 0.0
    if p.b <= x <= p.c:
        return 1.0
    if x < p.b:
        return (x - p.a) / (p.b - p.a)
    return (p.d - x) / (p.d - p.c)


@dataclass(frozen=True)
class MembershipFunction:
    """A named shape plus its raw parameter tuple.

    shapes and parameters:
      trapezoid  (a, b, c, d)
      triangular (a, peak, d)       -> trapezoid (a, peak, peak, d)
      singleton  (v,)               -> trapezoid (v, v, v, v)
      L          (ramp_start, core_start): 1 for x above core_start,
                 right side unbounded
      gamma      (core_end, ramp_end): 1 for x below core_end, left
                 side unbounded
    """

    shape: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ShapeError(f"unsupported shape {self.shape!r}; expected one of {SHAPES}")
        object.__setattr__(self, "params", tuple(float(v) for v in self.params))
        want = _SHAPE_ARITY[self.shape]
        if len(self.params) != want:
            raise ParameterError(
                f"shape {self.shape!r} takes {want} parameters, got {len(self.params)}"
            )

    def as_trapezoid(self, value_range: tuple[float, float] | None = None) -> TrapezoidParams:
        """Reduce to trapezoid bounds.

        value_range, when given, is the attribute's observed (min, max);
        it finitizes the unbounded side of L/gamma as min - span or
        max + span.  Without it the sentinel is +/-inf, which the
        membership formula handles without special cases.
        """
        p = self.params
        if self.shape == "trapezoid":
            return TrapezoidParams(*p)
        if self.shape == "triangular":
            return TrapezoidParams(p[0], p[1], p[1], p[2])
        if self.shape == "singleton":
            return TrapezoidParams(p[0], p[0], p[0], p[0])
        if value_range is None:
            lo_sentinel, hi_sentinel = -math.inf, math.inf
        else:
            lo, hi = value_range
            span = (hi - lo) or 1.0
            lo_sentinel, hi_sentinel = lo - span, hi + span
        if self.shape == "L":
            start, core = p
            return TrapezoidParams(start, core, max(hi_sentinel, core), max(hi_sentinel, core))
        # gamma: plateau on the left, ramp down on [core_end, ramp_end]
        core, end = p
        return TrapezoidParams(min(lo_sentinel, core), min(lo_sentinel, core), core, end)


@dataclass(frozen=True)
class LinguisticLabel:
    """An expert-provided fuzzy predicate over one numeric attribute."""

    attribute: str
    name: str
    fn: MembershipFunction

    @property
    def key(self) -> str:
        """Column name of this label in the knowledge base, e.g. 'Age-Young'."""
        return f"{self.attribute}-{self.name}"


def evaluate_label(
    x: float,
    label: LinguisticLabel,
    value_range: tuple[float, float] | None = None,
) -> float:
    """Degree of x under the label's shape (all shapes via the trapezoid path)."""
    return membership(x, label.fn.as_trapezoid(value_range))


def find_label(labels, attribute: str, name: str) -> LinguisticLabel | None:
    """Case-insensitive lookup of (attribute, name) in a catalog."""
    attribute, name = attribute.lower(), name.lower()
    for lab in labels:
        if lab.attribute.lower() == attribute and lab.name.lower() == name:
            return lab
    return None


def load_label_catalog(text: str) -> list[LinguisticLabel]:
    """Parse a label catalog from YAML (JSON works too, being a YAML subset).

    Expected document shape::

        labels:
          - attribute: Age
            name: Young
            shape: trapezoid
            params: [10, 18, 28, 38]

    (attribute, name) pairs must be unique within the catalog.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise CatalogError(f"catalog is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict) or "labels" not in doc:
        raise CatalogError("catalog must be a mapping with a top-level 'labels' list")
    entries = doc["labels"]
    if not isinstance(entries, list):
        raise CatalogError("'labels' must be a list")
    labels: list[LinguisticLabel] = []
    seen: set[tuple[str, str]] = set()
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise CatalogError(f"label #{i} is not a mapping")
        try:
            attribute = str(entry["attribute"])
            name = str(entry["name"])
            shape = str(entry["shape"])
            params = entry["params"]
        except KeyError as exc:
            raise CatalogError(f"label #{i} is missing key {exc.args[0]!r}") from exc
        if not isinstance(params, (list, tuple)):
            raise CatalogError(f"label #{i}: 'params' must be a list of numbers")
        try:
            fn = MembershipFunction(shape, tuple(params))
        except (ShapeError, ParameterError, TypeError, ValueError) as exc:
            raise CatalogError(f"label #{i} ({attribute}-{name}): {exc}") from exc
        ident = (attribute.lower(), name.lower())
        if ident in seen:
            raise CatalogError(f"duplicate label {attribute}-{name}")
        seen.add(ident)
        labels.append(LinguisticLabel(attribute, name, fn))
    return labels


def dump_label_catalog(labels) -> str:
    """Inverse of load_label_catalog."""
    doc = {
        "labels": [
            {
                "attribute": lab.attribute,
                "name": lab.name,
                "shape": lab.fn.shape,
                "params": list(lab.fn.params),
            }
            for lab in labels
        ]
    }
    return yaml.safe_dump(doc, sort_keys=False)
