"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """Base class for domain-level failures (maps to CLI exit code 1)."""


class InvalidStateError(DomainError):
    """A density matrix or sector violates its invariants."""


class DegenerateInputError(DomainError):
    """Input is in a degenerate limit where the result is not unique."""


class UndefinedQuantityError(DomainError):
    """The requested quantity is undefined for this input (e.g. vacuum)."""


class IllConditionedDesignError(DomainError):
    """A tomographic design matrix is too ill-conditioned to invert."""


class SchemaError(DomainError):
    """A JSON/CSV document does not match the expected schema."""
