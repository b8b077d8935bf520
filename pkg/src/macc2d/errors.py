"""Exception hierarchy shared by all macc2d modules."""


class MaccError(Exception):
    """Base class for every error raised by macc2d."""


class ParameterError(MaccError, ValueError):
    """Network or construction parameters violate a precondition."""


class StructureError(MaccError, ValueError):
    """An array is malformed (shape, alphabet or labels), as opposed to
    failing one of its defining conditions."""


class ArrayFormatError(StructureError):
    """A text document could not be parsed.

    ``line`` and ``column`` are 1-based positions in the input text.
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class SearchBudgetError(MaccError, RuntimeError):
    """The requested exhaustive search is larger than the allowed budget."""


class DegenerateChannelError(MaccError, RuntimeError):
    """No usable zero-forcing vector exists for this channel draw."""
