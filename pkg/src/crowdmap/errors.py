"""Exception types shared across the toolkit."""


class InvalidArgumentError(ValueError):
    """An argument violates an operation's precondition."""


class FormatError(ValueError):
    """A file could not be parsed.

    ``offset`` is the byte offset of the first problem when it is known
    (binary formats), ``line`` the 1-based line number for text formats.
    """

    def __init__(self, message, offset=None, line=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        elif line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.offset = offset
        self.line = line
