"""Exception hierarchy shared by all modules."""


class PfalgError(Exception):
    """Base class for every error raised by the package."""


class InputError(PfalgError, ValueError):
    """Malformed or inconsistent input (bad universes, partitions, files)."""


class UniverseError(InputError):
    """Partial functions over different point or value universes."""


class SignatureError(InputError):
    """An operation symbol is neither declared nor derivable."""


class ConsistencyError(InputError):
    """A declared table disagrees with the table derived from other operations."""


class FormatError(InputError):
    """A text file does not follow its format; carries a 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class LawSyntaxError(InputError):
    """Syntax error in a law, with 1-based line and column."""

    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class SizeError(PfalgError):
    """Carrier larger than the configured bound of an exhaustive routine."""


class BudgetError(PfalgError):
    """Enumeration would exceed the configured evaluation budget."""
