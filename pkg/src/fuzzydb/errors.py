"""Exception hierarchy shared across the engine.

Every domain error raised by the catalog, the physical encoding, the
store or the query engine derives from FuzzyDbError, so callers can
catch one base class at the boundary.  Structural file problems (a
catalog or data file that cannot even be parsed) use the *FileError
classes, which the CLI maps to a different exit code than validation
failures.
"""


class FuzzyDbError(Exception):
    """Base class for all engine errors."""


# --- value-level errors -------------------------------------------------

class BadShape(FuzzyDbError):
    """Trapezoid corners out of order, or an impossible value shape."""


class DegreeOutOfRange(FuzzyDbError):
    """A membership or similarity degree outside [0, 1]."""


class UnknownLabel(FuzzyDbError):
    """A linguistic label name that is not defined for the column."""


# --- catalog errors -----------------------------------------------------

class CatalogError(FuzzyDbError):
    """Base class for metaknowledge-catalog violations."""


class DuplicateColumn(CatalogError):
    pass


class BadLen(CatalogError):
    pass


class NoSuchColumn(CatalogError):
    pass


class DuplicateLabelId(CatalogError):
    pass


class DuplicateLabelName(CatalogError):
    pass


class TypeMismatch(CatalogError):
    """Label kind incompatible with the column's attribute type."""


class NoSuchLabel(CatalogError, UnknownLabel):
    """Catalog flavour of UnknownLabel: the referenced label row is absent."""


class NotTrapezoidalLabel(CatalogError):
    """Trapezoid requested for (or attached to) a scalar label."""


class DuplicateTrapezoid(CatalogError):
    pass


class SelfPair(CatalogError):
    """Similarity degree declared between a label and itself."""


class ConflictingDegree(CatalogError):
    """A second, different degree declared for the same label pair."""


class CatalogFrozen(CatalogError):
    """Mutation attempted after the catalog was validated and frozen."""


# --- physical encoding errors -------------------------------------------

class EncodingError(FuzzyDbError):
    """Base class for physical-protocol violations."""


class MalformedRow(EncodingError):
    """An encoded row that violates the protocol's null pattern or fields."""


class UnknownLabelId(EncodingError):
    """An encoded FUZZY_ID with no catalog row behind it."""


class TooManyPairs(EncodingError):
    """A possibility distribution longer than the column's LEN."""


# --- storage errors -----------------------------------------------------

class StorageError(FuzzyDbError):
    """Base class for relation/store violations."""


class DuplicateTable(StorageError):
    pass


class UnboundFuzzyColumn(StorageError):
    """Fuzzy column without a catalog binding, or bound to the wrong type."""


class KeyNotCrisp(StorageError):
    pass


class ArityMismatch(StorageError):
    pass


class DuplicateKey(StorageError):
    pass


class CatalogMismatch(StorageError):
    """Data file references catalog entries that do not exist."""


class IoFailure(StorageError):
    pass


# --- query errors -------------------------------------------------------

class QueryError(FuzzyDbError):
    """Base class for query-language errors."""


class QuerySyntaxError(QueryError):
    """Malformed query text; carries position and the expected tokens."""

    def __init__(self, message, line=None, column=None, expected=()):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)

    def __str__(self):
        if self.line is None:
            return self.message
        return f"{self.message} (line {self.line}, column {self.column})"


class TypeIncompatible(QueryError):
    """Constant family incompatible with the column kind."""


class NoSuchTable(QueryError):
    pass


# --- file-structure errors (CLI maps these to exit code 2) ---------------

class CatalogFileError(FuzzyDbError):
    """Catalog definition file that cannot be parsed at all."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line

    def __str__(self):
        if self.line is None:
            return super().__str__()
        return f"line {self.line}: {self.args[0]}"


class DataFileError(FuzzyDbError):
    """Data file whose structure (header, JSON framing) is broken."""
