"""Exception hierarchy shared by all prefforge modules."""


class PrefforgeError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(PrefforgeError):
    """A value violates a documented precondition or type invariant."""


class ProtocolError(PrefforgeError):
    """An elicitation call arrived out of order (duplicate or stale answer)."""


class DocumentError(PrefforgeError):
    """Base for persistence errors; carries a JSON-path location."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class ParseError(DocumentError):
    """The document is not valid JSON or not an object."""


class VersionMismatchError(DocumentError):
    """The document's format_version is missing or unsupported."""


class InvariantViolationError(DocumentError):
    """The document parsed but violates a model invariant."""
