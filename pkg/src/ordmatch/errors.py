"""Exception types shared across the package."""


class OrdmatchError(Exception):
    """Base class for all domain errors raised by this package."""


class RangeError(OrdmatchError):
    """A parameter is outside its supported range."""


class NotCollectable(OrdmatchError):
    """The pattern does not split into blocks, so the operation is undefined."""


class SizeMismatch(OrdmatchError):
    """Objects of incompatible uniformity or size were combined."""


class InvalidPartition(OrdmatchError):
    """A block-index partition is malformed (gaps, overlaps, or 1 not in the first part)."""


class InvalidWord(OrdmatchError):
    """A word does not encode a matching (unbalanced letter counts or bad symbols)."""


class InvalidTrace(OrdmatchError):
    """A digit sequence violates the staircase prefix property or is incomplete."""


class NotMismatch(OrdmatchError):
    """The pattern pair is not a mismatch."""


class NotPartite(OrdmatchError):
    """The matching is not r-partite."""


class OverlapError(OrdmatchError):
    """Edges expected to be disjoint share a vertex."""


class OrderViolation(OrdmatchError):
    """Vertex ranges of glued matchings are not consecutive and disjoint."""


class SolverMismatch(OrdmatchError):
    """The requested solver does not apply to this pattern family or instance."""


class CapExceeded(OrdmatchError):
    """The exhaustive computation would exceed its documented size cap."""


class UnboundedFamily(OrdmatchError):
    """A global clique maximum was requested for a family with unbounded cliques."""


class GeometryMismatch(OrdmatchError):
    """A planted hypergraph does not line up with the host vertex range."""


class InsufficientData(OrdmatchError):
    """Not enough data points to run the requested statistic."""


class InternalError(RuntimeError):
    """An invariant that should be mathematically guaranteed failed; report loudly."""
