"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class SSTRankError(Exception):
    exit_code = 1


class PreconditionError(SSTRankError, ValueError):
    """A caller-supplied argument violates an operation's precondition."""

    exit_code = 2


class InputShapeError(PreconditionError):
    pass


class DomainError(PreconditionError):
    pass


class ParameterError(PreconditionError):
    pass


class EmbeddingError(PreconditionError):
    pass


class InsufficientSamplesError(PreconditionError):
    pass


class ResourceError(SSTRankError):
    """Exact computation or search would exceed its configured resource cap."""

    exit_code = 3


class InvariantError(SSTRankError, ValueError):
    exit_code = 4


class LoadError(InvariantError):
    """An instance file is malformed or fails a model invariant."""
