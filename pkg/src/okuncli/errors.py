"""Exception types shared across the package."""


class OkunError(Exception):
    """Base class for every error raised by okuncli."""


class DataError(OkunError):
    """Bad input data: missing files, ragged CSV rows, unknown series, NA trouble."""


class ParseError(OkunError):
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


class SingularMatrixError(OkunError):
    """Design matrix is rank deficient."""

    def __init__(self, message, column=None):
        self.column = column
        super().__init__(message)


class ScriptError(OkunError):
    """Runtime failure while executing a script command."""

    def __init__(self, message, index=None, command=None):
        self.index = index
        self.command = command
        prefix = f"command {index + 1}: " if index is not None else ""
        super().__init__(prefix + message)
