"""Exception hierarchy shared across the package.

Every error raised by tablescout derives from TablescoutError so callers
can catch the whole family with one clause. The service layer maps these
classes onto HTTP status codes; the CLI maps them onto exit codes.
"""


class TablescoutError(Exception):
    """Base class for all tablescout errors."""


# --- table / pool ingestion ---------------------------------------------


class RaggedTableError(TablescoutError):
    """A CSV row has a different arity than the header."""


class EmptyTableError(TablescoutError):
    """A table file contains no header row."""


class DuplicateIdError(TablescoutError):
    """Two tables in a pool (or index) share an id."""


class EmptyPoolError(TablescoutError):
    """A pool directory holds no table files."""


# --- benchmarks ----------------------------------------------------------


class DanglingQrelError(TablescoutError):
    """A relevance judgment references a query that does not exist."""


class GradeOutOfRangeError(TablescoutError):
    """A relevance grade exceeds the benchmark's declared maximum."""


# --- query validation ----------------------------------------------------


class MissingKeyColumnError(TablescoutError):
    """A join query did not name a key column."""


class UnknownColumnError(TablescoutError):
    """A named column is not part of the referenced table."""


class MissingConditionError(TablescoutError):
    """An NL-only query carries no condition text."""


class MissingQueryTableError(TablescoutError):
    """A union/join query carries no query table."""


# --- embedding providers --------------------------------------------------


class ProviderUnavailableError(TablescoutError):
    """The remote embedding endpoint could not be reached or errored."""


class DimMismatchError(TablescoutError):
    """Vector dimensions do not agree with the configured dimension."""


# --- vector index ---------------------------------------------------------


class CorruptIndexError(TablescoutError):
    """An index file failed structural validation; message carries the offset."""


class UnsupportedVersionError(TablescoutError):
    """A persisted artifact was written by a newer format version."""


class IndexNotReadyError(TablescoutError):
    """A search was attempted before the pool's index was built."""


# --- scoring --------------------------------------------------------------


class EmptyCandidateError(TablescoutError):
    """A scorer received an empty column list."""


class InvalidWeightError(TablescoutError):
    """A matching weight is NaN or infinite."""


class EmptyVectorListError(TablescoutError):
    """Max-pooling was asked to reduce zero vectors."""


# --- training -------------------------------------------------------------


class EmptyBatchError(TablescoutError):
    """A loss/gradient evaluation received no examples."""


class DivergenceDetectedError(TablescoutError):
    """Training loss became non-finite; message names the epoch."""


class CorruptCheckpointError(TablescoutError):
    """A model checkpoint failed structural validation."""


# --- service --------------------------------------------------------------


class UnknownTableError(TablescoutError):
    """A table id was not found in the pool or result set."""


class UnknownPoolError(TablescoutError):
    """A pool id was not registered with the service."""
