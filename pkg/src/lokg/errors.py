"""Exception types raised across the pipeline, one per failure contract."""


class LokgError(Exception):
    """Base class for all errors raised by this package."""


# --- dataset / taxonomy ---------------------------------------------------

class SchemaError(LokgError):
    """Input document does not conform to the dataset schema."""


class LevelViolation(SchemaError):
    """A parent reference does not point exactly one level above."""


class DuplicateId(SchemaError):
    """Two objects in one dataset share an id."""


# --- providers ------------------------------------------------------------

class ProviderError(LokgError):
    """Base class for text-service provider failures."""


class EmptyText(ProviderError):
    """Operation requires non-empty text."""


class ProviderUnavailable(ProviderError):
    """External provider unreachable or persistently returning 503."""


class ProtocolError(ProviderError):
    """External provider returned a malformed or out-of-contract response."""


class UnsupportedPair(ProviderError):
    """Requested translation language pair is not supported."""


class DimensionMismatch(ProviderError):
    """Provider returned embedding vectors of inconsistent dimension."""


# --- text mining ----------------------------------------------------------

class EmptyTitle(LokgError):
    """Title is empty after cleaning."""


class EmptyDescription(LokgError):
    """Description is empty after cleaning."""


class EmptyTopicSet(LokgError):
    """Topic set has no topics."""


class ProviderTagMismatch(LokgError):
    """Vectors from different providers/models must never be compared."""


class LevelNotEnabled(LokgError):
    """Pair of taxonomy levels is not enabled for relation mining."""


# --- knowledge graph ------------------------------------------------------

class DanglingReference(LokgError):
    """Verdict or edge references an id absent from the graph."""


class NotAJourney(LokgError):
    """Operation requires Journey-level node ids."""


# --- metrics --------------------------------------------------------------

class EmptyGraph(LokgError):
    """Metric requires a non-empty graph."""


class PartitionMismatch(LokgError):
    """Partition does not cover exactly the graph's node set."""


class NonPositiveWeight(LokgError):
    """Weighted shortest paths require strictly positive edge weights."""


class BadPivotCount(LokgError):
    """Pivot count must satisfy 1 <= k <= |V|."""


# --- evaluation -----------------------------------------------------------

class JourneyTooSmall(LokgError):
    """Journey contains fewer than two comparable learning objects."""


class NoSemanticEdges(LokgError):
    """Graph has no cross-journey semantic edges to assess."""


class UndefinedJourneySimilarity(LokgError):
    """A touched journey has no defined internal similarity."""


# --- cli ------------------------------------------------------------------

class ConfigError(LokgError):
    """Run configuration is invalid or references missing paths."""
