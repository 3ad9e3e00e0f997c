"""Exception hierarchy shared across the engine."""


class EngineError(Exception):
    """Base class for all engine-raised errors."""


class ParameterError(EngineError):
    """A numeric parameter is outside its allowed range or ordering."""


class ShapeError(EngineError):
    """A membership function names a shape the engine does not support."""


class SchemaError(EngineError):
    """A label or query references an attribute the relation does not have."""


class RangeError(EngineError):
    """No observed value range is available (empty relation)."""


class KBFormatError(EngineError):
    """A persisted knowledge-base file failed to parse.

    Carries the 1-based line number and, where meaningful, the offending
    field text.
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)


class CatalogError(EngineError):
    """A label catalog file is malformed or self-inconsistent."""


class PipelineOrderError(EngineError):
    """A CLI/service step ran before its prerequisites (e.g. query before build-kb)."""
