"""fuzzydb: a small relational engine for imprecise and uncertain data.

A metaknowledge catalog (FCL/FOL/FLD/FND) describes which columns are
fuzzy and how; values are stored through fixed physical encodings and
queried with a flexible mini-language whose FEQ comparator returns a
compliance degree instead of a boolean.
"""

from .catalog import (
    Catalog,
    FclRow,
    FldRow,
    FndRow,
    FolRow,
    SCALAR,
    TRAPEZOIDAL,
    Violation,
)
from .catfile import read_catalog, write_catalog
from .encoding import (
    EncodedRow2,
    EncodedRow3,
    decode_type2,
    decode_type3,
    emit_loader_script,
    encode_type2,
    encode_type3,
)
from .errors import FuzzyDbError
from .query import QueryResult, parse_query, query_text, run_query
from .storage import (
    ColumnKind,
    ColumnSpec,
    Database,
    Relation,
    load_relation,
    save_relation,
)
from .values import (
    FuzzyValue2,
    FuzzyValue3,
    PossPair,
    SimilarityRelation,
    Trapezoid,
    feq_type2,
    feq_type3,
    possibility,
)

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "ColumnKind",
    "ColumnSpec",
    "Database",
    "EncodedRow2",
    "EncodedRow3",
    "FclRow",
    "FldRow",
    "FndRow",
    "FolRow",
    "FuzzyDbError",
    "FuzzyValue2",
    "FuzzyValue3",
    "PossPair",
    "QueryResult",
    "Relation",
    "SCALAR",
    "SimilarityRelation",
    "TRAPEZOIDAL",
    "Trapezoid",
    "Violation",
    "decode_type2",
    "decode_type3",
    "emit_loader_script",
    "encode_type2",
    "encode_type3",
    "feq_type2",
    "feq_type3",
    "load_relation",
    "parse_query",
    "possibility",
    "query_text",
    "read_catalog",
    "run_query",
    "save_relation",
    "write_catalog",
    "__version__",
]
