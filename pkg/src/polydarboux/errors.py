"""Exception hierarchy shared across the package."""


class PolydarbouxError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(PolydarbouxError, ValueError):
    """Operands live on incompatible spaces."""


class PreconditionError(PolydarbouxError, ValueError):
    """An operation was called outside its stated domain."""


class ConstructionError(PolydarbouxError, RuntimeError):
    """A structure-backed construction failed (e.g. no canonical basis exists)."""


class DocumentError(PolydarbouxError, ValueError):
    """A form description file is malformed or violates its invariants."""


class InternalCheckError(PolydarbouxError, RuntimeError):
    """An internal consistency cross-check failed; indicates a bug."""
