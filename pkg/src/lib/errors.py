from pathlib import Path


class BurniatError(Exception):
    """Base class for every error raised by the toolkit."""


class InputError(BurniatError):
    """Malformed or inconsistent user input (exit status 2 on the command line)."""


class ParseError(InputError):
    """Text input that does not follow one of the documented file formats."""

    def __init__(self, message: str, path: str | Path | None = None, line: int = 0, column: int = 0) -> None:
        self.message = message
        self.path = str(path) if path is not None else "<string>"
        self.line = line
        self.column = column
        super().__init__(f"{self.path}:{line}:{column}: {message}")


class UnboundedError(BurniatError):
    """A vertex or volume operation was asked about an unbounded polyhedron."""


class HypothesisError(BurniatError):
    """The hypothesis of a polytope criterion does not hold for the given arrangement."""
