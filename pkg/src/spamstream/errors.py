"""Exception hierarchy shared by every module."""


class SpamStreamError(Exception):
    """Base class for all package errors."""


class ParseError(SpamStreamError, ValueError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)


class SchemaError(SpamStreamError, ValueError):
    """A record is missing a required field or carries a wrongly typed one."""

    def __init__(self, field: str, message: str = "missing or invalid field", line_no: int | None = None):
        self.field = field
        self.message = message
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{prefix}{field}: {message}")


class DomainError(SpamStreamError, ValueError):
    pass


class InsufficientDataError(SpamStreamError, ValueError):
    pass


class DegenerateDataError(SpamStreamError, ValueError):
    pass


class ResourceError(SpamStreamError, FileNotFoundError):
    def __init__(self, name: str, message: str = "resource file missing"):
        self.name = name
        super().__init__(f"{name}: {message}")


class DuplicateTweetError(SpamStreamError, ValueError):
    pass


class StaleWindowError(SpamStreamError, RuntimeError):
    pass


class NotBootstrappedError(SpamStreamError, RuntimeError):
    pass


class SchemaVersionError(SpamStreamError, ValueError):
    """Feature vector and model were built against different feature schemas."""


class OrderingError(SpamStreamError, ValueError):
    pass


class UndefinedMetricsError(SpamStreamError, ValueError):
    pass


class SnapshotVersionError(SpamStreamError, ValueError):
    pass
