"""Exception types shared across the package."""


class PhotonicRNNError(Exception):
    """Base class for package errors."""


class ParseError(PhotonicRNNError, ValueError):
    """A user-supplied file could not be parsed.

    The message always names the file and, where known, the 1-based line.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        self.reason = message
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(f"{where}{message}")


class ConstraintViolation(PhotonicRNNError, ValueError):
    """An accelerator configuration violates a hardware constraint."""
