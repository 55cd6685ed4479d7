"""Exception hierarchy shared across the package."""


class ContextualityError(Exception):
    """Base class for all errors raised by this package."""


class InvalidBoxError(ContextualityError, ValueError):
    """A box (or joint distribution) violates its structural invariants."""


class HypergraphMismatchError(ContextualityError, ValueError):
    """An operation received boxes or elements on incompatible hypergraphs."""


class InconsistentBoxError(ContextualityError, ValueError):
    """An operation defined only for consistent boxes received an inconsistent one."""


class NotXorBoxError(ContextualityError, ValueError):
    """An operation restricted to xor-boxes received something else."""


class CapExceededError(ContextualityError, RuntimeError):
    """An enumeration or closure would exceed its configured size cap."""


class BoxFileError(ContextualityError, ValueError):
    """A box spec file is malformed or violates the schema."""
