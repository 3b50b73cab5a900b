"""Exception hierarchy shared by all twistlab modules."""


class TwistlabError(Exception):
    """Base class for library errors."""


class ValidationError(TwistlabError, ValueError):
    """An input failed a structural check (shape, self-adjointness, ...)."""


class PreconditionError(TwistlabError):
    """An operation was called outside the regime where it is defined."""


class GuardError(TwistlabError):
    """A resource guard (ambient dimension, enumeration size) was exceeded."""


class TruncationError(PreconditionError):
    """The Fock truncation level is too small for the requested computation."""
