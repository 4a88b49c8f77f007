"""Shared exception types."""


class SpecError(Exception):
    """A problem in the annotated script or its config.

    Carries the 1-based source line number when one is known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyMultiverseError(Exception):
    """All decision combinations were excluded by constraints."""


class RunError(Exception):
    """Execution-time failure (missing interpreter, locked output dir, ...)."""
