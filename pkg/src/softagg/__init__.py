"""softagg: online approximate aggregation for fuzzy flexible queries.

Pipeline: a relation plus an expert label catalog become a threshold-
pruned knowledge base of membership degrees; queries with fuzzy IS
predicates are parsed, validated and rewritten into approximate form;
a seeded sampler feeds batches through per-batch formal-concept tables
into a running estimate that streams out with conservative confidence
intervals until the data is exhausted or the consumer cancels.
"""

from .aggregate import (
    ProgressEvent,
    RunningEstimate,
    error_rate,
    exact_answer,
    fold_batch,
    run_query,
)
from .concepts import (
    ConceptRow,
    ConceptsTable,
    ExtentEntry,
    FormalContext,
    build_concepts_table,
    build_context,
    diagnose_empty,
    dump_table,
    qualifying_tuples,
)
from .errors import (
    CatalogError,
    EngineError,
    KBFormatError,
    ParameterError,
    PipelineOrderError,
    RangeError,
    SchemaError,
    ShapeError,
)
from .kb import (
    KnowledgeBase,
    Relation,
    build_kb,
    load_kb,
    parse_kb,
    dump_kb,
    relation_from_csv,
    save_kb,
)
from .membership import (
    LinguisticLabel,
    MembershipFunction,
    TrapezoidParams,
    dump_label_catalog,
    evaluate_label,
    find_label,
    load_label_catalog,
    membership,
)
from .query import (
    ApproximateQuery,
    Diagnostic,
    FlexibleQuery,
    QuerySyntaxError,
    parse,
    resolve_labels,
    rewrite,
    validate,
)
from .sampling import BatchSampler, SampleBatch, batch_size_for, new_sampler

__version__ = "0.1.0"

__all__ = [
    "ApproximateQuery",
    "BatchSampler",
    "CatalogError",
    "ConceptRow",
    "ConceptsTable",
    "Diagnostic",
    "EngineError",
    "ExtentEntry",
    "FlexibleQuery",
    "FormalContext",
    "KBFormatError",
    "KnowledgeBase",
    "LinguisticLabel",
    "MembershipFunction",
    "ParameterError",
    "PipelineOrderError",
    "ProgressEvent",
    "QuerySyntaxError",
    "RangeError",
    "Relation",
    "RunningEstimate",
    "SampleBatch",
    "SchemaError",
    "ShapeError",
    "TrapezoidParams",
    "batch_size_for",
    "build_concepts_table",
    "build_context",
    "build_kb",
    "diagnose_empty",
    "dump_kb",
    "dump_label_catalog",
    "dump_table",
    "error_rate",
    "evaluate_label",
    "exact_answer",
    "find_label",
    "fold_batch",
    "load_kb",
    "load_label_catalog",
    "membership",
    "new_sampler",
    "parse",
    "parse_kb",
    "qualifying_tuples",
    "relation_from_csv",
    "resolve_labels",
    "rewrite",
    "run_query",
    "save_kb",
    "validate",
]
