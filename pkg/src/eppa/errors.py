"""Exception types shared across the package."""


class EppaError(Exception):
    """Base class for all errors raised by this package."""


class SignatureMismatch(EppaError):
    """Two structures that must share a signature do not."""


class UnknownElement(EppaError):
    """An element id was referenced that is not in the structure's domain."""


class CapExceeded(EppaError):
    """A configured size/enumeration cap was exceeded."""


class EmbeddingFailure(EppaError):
    """The coset structure's base map failed to be an embedding.

    Raised by the coset-extension builder when the supplied quotient is too
    coarse; carries a human-readable witness of the failure.
    """

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class CoverVerificationError(EppaError):
    """A canonical cover failed a check that should hold by construction.

    Seeing this indicates a bug in the caller's inputs or in this package,
    not a property of the mathematics.
    """


class InputError(EppaError):
    """Malformed file or argument content."""
